#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ballast/text/corpus.hpp"

namespace ballast::text {

struct LdaOptions {
  std::size_t topics = 20;
  std::size_t iterations = 200;
  std::uint64_t seed = 42;
  std::optional<double> alpha;  // defaults to 50 / topics
  double beta = 0.01;
};

// Topic model with smoothed count estimates. Rows of both matrices are
// probability vectors.
struct TopicModel {
  std::size_t n_topics = 0;
  std::size_t vocab_size = 0;
  std::vector<double> topic_word;  // n_topics x vocab_size, row-major
  std::vector<double> doc_topic;   // n_docs x n_topics, row-major
  double alpha = 0.0;
  double beta = 0.0;
  std::uint64_t seed = 0;

  std::size_t n_docs() const noexcept { return n_topics ? doc_topic.size() / n_topics : 0; }
  std::span<const double> topic_row(std::size_t k) const;
  std::span<const double> doc_row(std::size_t d) const;

  // Term indices of topic k ordered by probability (ties: lower index first).
  std::vector<std::uint32_t> top_words(std::size_t k, std::size_t count) const;

  // Mean over tokens of p(topic | word), with p(topic | word) proportional to
  // the topic-word probabilities. An empty token list gives the uniform vector.
  std::vector<double> topic_mixture(std::span<const std::uint32_t> tokens) const;
};

// Collapsed Gibbs sampling with symmetric priors. Tokens are visited document
// by document in corpus order; the result is bit-reproducible for a given
// corpus, option set and seed.
TopicModel lda_fit(const Corpus& corpus, const LdaOptions& options);

// UMass coherence over document co-occurrence:
//   2 / (M (M - 1)) * sum_{i<j} ln((D(w_i, w_j) + 1) / D(w_j))
// Throws DataError for fewer than two words or a word absent from the corpus.
double umass_coherence(std::span<const std::string> top_words, const Corpus& corpus);

}  // namespace ballast::text
