#include "ballast/core/corpus_io.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "ballast/error.hpp"

namespace ballast {

namespace {

using json = nlohmann::json;

std::string string_field(const json& record, const char* key) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_array()) {
    // body_text style: list of paragraphs, either strings or {"text": ...}.
    std::string out;
    for (const auto& part : *it) {
      std::string piece;
      if (part.is_string()) {
        piece = part.get<std::string>();
      } else if (part.is_object() && part.contains("text") && part["text"].is_string()) {
        piece = part["text"].get<std::string>();
      }
      if (piece.empty()) continue;
      if (!out.empty()) out.push_back('\n');
      out += piece;
    }
    return out;
  }
  return it->dump();
}

}  // namespace

std::size_t word_count(const std::string& text) {
  std::size_t count = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++count;
    in_word = !space;
  }
  return count;
}

RawCorpus load_corpus(std::istream& in, CorpusFormat format, std::size_t min_words) {
  RawCorpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    RawDocument doc;
    if (format == CorpusFormat::Jsonl) {
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      json record;
      try {
        record = json::parse(line);
      } catch (const json::parse_error& e) {
        throw DataError("malformed corpus line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!record.is_object()) {
        throw DataError("corpus line " + std::to_string(line_no) + " is not a JSON object");
      }
      doc.id = string_field(record, "id");
      if (doc.id.empty()) doc.id = std::to_string(line_no);
      doc.title = string_field(record, "title");
      doc.abstract = string_field(record, "abstract");
      doc.body = string_field(record, "body");
      if (doc.body.empty()) doc.body = string_field(record, "body_text");
    } else {
      doc.id = std::to_string(line_no);
      doc.body = line;
    }
    const std::size_t words = word_count(doc.body);
    if (words == 0 || words < min_words) {
      ++corpus.dropped;
      continue;
    }
    corpus.docs.push_back(std::move(doc));
  }
  if (corpus.docs.empty()) {
    throw DataError("no documents left after filtering (" + std::to_string(corpus.dropped) +
                    " dropped below " + std::to_string(min_words) + " words)");
  }
  return corpus;
}

CorpusFormat corpus_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? CorpusFormat::Jsonl : CorpusFormat::PlainLines;
}

RawCorpus load_corpus(const std::filesystem::path& path, std::size_t min_words) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read corpus '" + path.string() + "'");
  return load_corpus(in, corpus_format_for(path), min_words);
}

void write_corpus_jsonl(std::ostream& out, const std::vector<RawDocument>& docs) {
  for (const auto& d : docs) {
    nlohmann::ordered_json rec;
    rec["id"] = d.id;
    rec["title"] = d.title;
    rec["abstract"] = d.abstract;
    rec["body"] = d.body;
    out << rec.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
  }
}

}  // namespace ballast
