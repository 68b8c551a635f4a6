#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ballast/core/corpus_io.hpp"
#include "ballast/text/tokenize.hpp"

namespace ballast::text {

enum class Field : std::uint8_t { Title, Abstract, Body };

struct Sentence {
  Field field = Field::Body;
  std::string text;
  std::vector<std::uint32_t> tokens;  // vocabulary indices
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;

  std::size_t token_count() const;
};

// Tokenized corpus. Vocabulary indices are dense and follow first appearance.
struct Corpus {
  std::vector<Document> docs;
  std::vector<std::string> vocab;
  std::unordered_map<std::string, std::uint32_t> term_index;
  std::vector<std::uint32_t> doc_freq;   // documents containing each term
  std::vector<std::uint64_t> term_freq;  // total occurrences of each term

  std::size_t vocab_size() const noexcept { return vocab.size(); }
  std::size_t sentence_count() const;
  // Token lists as strings, one per document or one per sentence.
  std::vector<std::vector<std::string>> document_tokens() const;
  std::vector<std::vector<std::string>> sentence_tokens() const;
};

// Titles become a single sentence; abstract and body are segmented.
Corpus build_corpus(const RawCorpus& raw, const TokenizerConfig& config);
Corpus build_corpus(const std::vector<std::string>& documents, const TokenizerConfig& config);

}  // namespace ballast::text
