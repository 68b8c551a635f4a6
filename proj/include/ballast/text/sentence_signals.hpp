#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ballast/core/corpus_io.hpp"
#include "ballast/text/corpus.hpp"
#include "ballast/text/lda.hpp"
#include "ballast/text/textrank.hpp"

namespace ballast::text {

// Externally computed sentence vectors keyed by unit id "<doc_id>:<index>"
// (0-based sentence index within the document).
struct EmbeddingTable {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> vectors;
};

// CSV `unit_id,v0,...,v{d-1}`.
EmbeddingTable load_embeddings(const std::filesystem::path& path);

std::string sentence_unit_id(const Document& doc, std::size_t sentence_index);

struct SentenceSignalOptions {
  double tfidf_decile = 0.1;      // lowest fraction flagged as low-information
  double entropy_max_bits = 1.5;  // strictly below is lexically sparse
  double cosine_min = 0.95;       // at or above is redundant
  double js_top_fraction = 0.1;   // highest fraction flagged as off-topic
  TextRankOptions textrank;
};

struct SentenceRecord {
  std::size_t doc = 0;
  std::size_t sentence = 0;
  double tfidf_sum = 0.0;
  double entropy_bits = 0.0;
  double max_cosine = 0.0;
  std::optional<double> topic_js;
  double textrank = 0.0;  // within its document
  bool low_tfidf = false;
  bool low_entropy = false;
  bool redundant = false;
  bool off_topic = false;

  std::vector<bool> flags() const { return {low_tfidf, low_entropy, redundant, off_topic}; }
};

struct SentenceSignals {
  std::vector<SentenceRecord> rows;  // corpus order
  double tfidf_threshold = 0.0;
  std::optional<double> js_threshold;
};

// Plug-in entropy (bits) of the token distribution within one sentence.
double sentence_entropy(const std::vector<std::uint32_t>& tokens);

// Raw signals and flags for every sentence:
//   tfidf_sum   sum of the sentence's unnormalized TF-IDF weights, with idf
//               taken over sentences
//   max_cosine  largest cosine to any other sentence in the corpus, on the
//               ingested embeddings when given, else on TF-IDF rows
//   topic_js    JS divergence between the sentence's topic mixture and its
//               document's topic distribution (only when `topics` is given)
// Decile thresholds use the nearest-rank rule over the corpus-wide
// distribution. Throws DataError for corpora with fewer than 10 sentences.
SentenceSignals sentence_signals(const Corpus& corpus, const SentenceSignalOptions& options,
                                 const TopicModel* topics = nullptr,
                                 const EmbeddingTable* embeddings = nullptr);

// Rebuilds documents from the sentences whose `keep` entry is true, in corpus
// order. Sentences of a field are joined with single spaces.
std::vector<RawDocument> reconstruct_documents(const Corpus& corpus, const std::vector<bool>& keep);

}  // namespace ballast::text
