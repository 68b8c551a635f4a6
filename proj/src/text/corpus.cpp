#include "ballast/text/corpus.hpp"

#include <algorithm>

namespace ballast::text {

namespace {

class CorpusBuilder {
 public:
  explicit CorpusBuilder(const TokenizerConfig& config) : config_(config) {}

  void add_field(Document& doc, Field field, const std::string& text, bool segment) {
    if (text.empty()) return;
    std::vector<std::string> pieces;
    if (segment) {
      pieces = split_sentences(text);
    } else {
      pieces.push_back(text);
    }
    for (auto& piece : pieces) {
      Sentence s;
      s.field = field;
      for (auto& tok : tokenize(piece, config_)) s.tokens.push_back(intern(tok));
      s.text = std::move(piece);
      doc.sentences.push_back(std::move(s));
    }
  }

  void finish_document(Document doc) {
    std::vector<std::uint32_t> seen;
    for (const auto& s : doc.sentences) seen.insert(seen.end(), s.tokens.begin(), s.tokens.end());
    std::sort(seen.begin(), seen.end());
    seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
    for (auto t : seen) ++corpus_.doc_freq[t];
    corpus_.docs.push_back(std::move(doc));
  }

  Corpus take() && { return std::move(corpus_); }

 private:
  std::uint32_t intern(const std::string& term) {
    auto [it, inserted] =
        corpus_.term_index.emplace(term, static_cast<std::uint32_t>(corpus_.vocab.size()));
    if (inserted) {
      corpus_.vocab.push_back(term);
      corpus_.doc_freq.push_back(0);
      corpus_.term_freq.push_back(0);
    }
    ++corpus_.term_freq[it->second];
    return it->second;
  }

  const TokenizerConfig& config_;
  Corpus corpus_;
};

}  // namespace

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

std::size_t Corpus::sentence_count() const {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.sentences.size();
  return n;
}

std::vector<std::vector<std::string>> Corpus::document_tokens() const {
  std::vector<std::vector<std::string>> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    auto& row = out.emplace_back();
    for (const auto& s : d.sentences) {
      for (auto t : s.tokens) row.push_back(vocab[t]);
    }
  }
  return out;
}

std::vector<std::vector<std::string>> Corpus::sentence_tokens() const {
  std::vector<std::vector<std::string>> out;
  for (const auto& d : docs) {
    for (const auto& s : d.sentences) {
      auto& row = out.emplace_back();
      for (auto t : s.tokens) row.push_back(vocab[t]);
    }
  }
  return out;
}

Corpus build_corpus(const RawCorpus& raw, const TokenizerConfig& config) {
  CorpusBuilder builder(config);
  for (const auto& rd : raw.docs) {
    Document doc;
    doc.id = rd.id;
    builder.add_field(doc, Field::Title, rd.title, false);
    builder.add_field(doc, Field::Abstract, rd.abstract, true);
    builder.add_field(doc, Field::Body, rd.body, true);
    builder.finish_document(std::move(doc));
  }
  return std::move(builder).take();
}

Corpus build_corpus(const std::vector<std::string>& documents, const TokenizerConfig& config) {
  CorpusBuilder builder(config);
  for (std::size_t i = 0; i < documents.size(); ++i) {
    Document doc;
    doc.id = std::to_string(i + 1);
    builder.add_field(doc, Field::Body, documents[i], true);
    builder.finish_document(std::move(doc));
  }
  return std::move(builder).take();
}

}  // namespace ballast::text
