#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace ballast {

struct RawDocument {
  std::string id;
  std::string title;
  std::string abstract;
  std::string body;
};

struct RawCorpus {
  std::vector<RawDocument> docs;
  std::size_t dropped = 0;  // documents under the word minimum
};

enum class CorpusFormat { Jsonl, PlainLines };

// Whitespace-delimited word count of a document body.
std::size_t word_count(const std::string& text);

// JSONL records carry {id, title, abstract, body}; plain-text input holds one
// document body per line with the 1-based line number as id. Documents whose
// body has fewer than `min_words` words are dropped. Throws DataError when no
// document survives.
RawCorpus load_corpus(std::istream& in, CorpusFormat format, std::size_t min_words);
RawCorpus load_corpus(const std::filesystem::path& path, std::size_t min_words);

// `.jsonl` / `.json` select JSONL; anything else is plain lines.
CorpusFormat corpus_format_for(const std::filesystem::path& path);

void write_corpus_jsonl(std::ostream& out, const std::vector<RawDocument>& docs);

}  // namespace ballast
