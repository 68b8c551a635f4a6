#include "ballast/text/lda.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <random>

#include "ballast/error.hpp"
#include "ballast/random.hpp"

namespace ballast::text {

std::span<const double> TopicModel::topic_row(std::size_t k) const {
  return std::span<const double>(topic_word).subspan(k * vocab_size, vocab_size);
}

std::span<const double> TopicModel::doc_row(std::size_t d) const {
  return std::span<const double>(doc_topic).subspan(d * n_topics, n_topics);
}

std::vector<std::uint32_t> TopicModel::top_words(std::size_t k, std::size_t count) const {
  const auto row = topic_row(k);
  std::vector<std::uint32_t> ids(vocab_size);
  std::iota(ids.begin(), ids.end(), 0u);
  std::stable_sort(ids.begin(), ids.end(), [&](auto a, auto b) { return row[a] > row[b]; });
  ids.resize(std::min(count, ids.size()));
  return ids;
}

std::vector<double> TopicModel::topic_mixture(std::span<const std::uint32_t> tokens) const {
  std::vector<double> mix(n_topics, 0.0);
  if (tokens.empty()) {
    std::fill(mix.begin(), mix.end(), 1.0 / static_cast<double>(n_topics));
    return mix;
  }
  std::vector<double> p(n_topics);
  for (auto w : tokens) {
    double total = 0.0;
    for (std::size_t k = 0; k < n_topics; ++k) {
      p[k] = topic_word[k * vocab_size + w];
      total += p[k];
    }
    for (std::size_t k = 0; k < n_topics; ++k) mix[k] += p[k] / total;
  }
  const double total = std::accumulate(mix.begin(), mix.end(), 0.0);
  for (auto& m : mix) m /= total;
  return mix;
}

TopicModel lda_fit(const Corpus& corpus, const LdaOptions& options) {
  const std::size_t k_topics = options.topics;
  const std::size_t v = corpus.vocab_size();
  if (k_topics < 1) throw ConfigError("LDA needs at least one topic");
  if (v == 0) throw DataError("LDA needs a non-empty vocabulary");
  if (k_topics > v) {
    throw ConfigError("LDA topic count " + std::to_string(k_topics) + " exceeds vocabulary size " +
                      std::to_string(v));
  }
  const double alpha = options.alpha.value_or(50.0 / static_cast<double>(k_topics));
  const double beta = options.beta;
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("LDA priors must be positive");

  const std::size_t n_docs = corpus.docs.size();
  std::vector<std::vector<std::uint32_t>> words(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    for (const auto& s : corpus.docs[d].sentences) {
      words[d].insert(words[d].end(), s.tokens.begin(), s.tokens.end());
    }
  }

  std::mt19937_64 rng(options.seed);
  std::vector<std::vector<std::uint32_t>> z(n_docs);
  std::vector<std::uint32_t> n_dk(n_docs * k_topics, 0);
  std::vector<std::uint32_t> n_kw(k_topics * v, 0);
  std::vector<std::uint32_t> n_k(k_topics, 0);

  for (std::size_t d = 0; d < n_docs; ++d) {
    z[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      const auto k = static_cast<std::uint32_t>(
          std::min<std::size_t>(k_topics - 1, static_cast<std::size_t>(unit_uniform(rng) * k_topics)));
      z[d][i] = k;
      ++n_dk[d * k_topics + k];
      ++n_kw[k * v + words[d][i]];
      ++n_k[k];
    }
  }

  const double v_beta = static_cast<double>(v) * beta;
  std::vector<double> cumulative(k_topics);
  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    for (std::size_t d = 0; d < n_docs; ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const auto w = words[d][i];
        auto k = z[d][i];
        --n_dk[d * k_topics + k];
        --n_kw[k * v + w];
        --n_k[k];

        double total = 0.0;
        for (std::size_t t = 0; t < k_topics; ++t) {
          total += (n_dk[d * k_topics + t] + alpha) * (n_kw[t * v + w] + beta) / (n_k[t] + v_beta);
          cumulative[t] = total;
        }
        const double u = unit_uniform(rng) * total;
        k = static_cast<std::uint32_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (k >= k_topics) k = static_cast<std::uint32_t>(k_topics - 1);

        z[d][i] = k;
        ++n_dk[d * k_topics + k];
        ++n_kw[k * v + w];
        ++n_k[k];
      }
    }
  }

  TopicModel model;
  model.n_topics = k_topics;
  model.vocab_size = v;
  model.alpha = alpha;
  model.beta = beta;
  model.seed = options.seed;
  model.topic_word.resize(k_topics * v);
  for (std::size_t k = 0; k < k_topics; ++k) {
    const double denom = n_k[k] + v_beta;
    for (std::size_t w = 0; w < v; ++w) model.topic_word[k * v + w] = (n_kw[k * v + w] + beta) / denom;
  }
  model.doc_topic.resize(n_docs * k_topics);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const double denom = static_cast<double>(words[d].size()) + static_cast<double>(k_topics) * alpha;
    for (std::size_t k = 0; k < k_topics; ++k) {
      model.doc_topic[d * k_topics + k] = (n_dk[d * k_topics + k] + alpha) / denom;
    }
  }
  return model;
}

double umass_coherence(std::span<const std::string> top_words, const Corpus& corpus) {
  const std::size_t m = top_words.size();
  if (m < 2) throw DataError("UMass coherence needs at least two words");

  // Document sets per word, as sorted document indices.
  std::vector<std::vector<std::size_t>> docs_with(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto it = corpus.term_index.find(top_words[i]);
    if (it == corpus.term_index.end()) {
      throw DataError("word '" + top_words[i] + "' does not occur in the corpus");
    }
    const auto id = it->second;
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
      bool found = false;
      for (const auto& s : corpus.docs[d].sentences) {
        if (std::find(s.tokens.begin(), s.tokens.end(), id) != s.tokens.end()) {
          found = true;
          break;
        }
      }
      if (found) docs_with[i].push_back(d);
    }
    if (docs_with[i].empty()) {
      throw DataError("word '" + top_words[i] + "' does not occur in any document");
    }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      std::vector<std::size_t> both;
      std::set_intersection(docs_with[i].begin(), docs_with[i].end(), docs_with[j].begin(),
                            docs_with[j].end(), std::back_inserter(both));
      sum += std::log((static_cast<double>(both.size()) + 1.0) /
                      static_cast<double>(docs_with[j].size()));
    }
  }
  return 2.0 / (static_cast<double>(m) * static_cast<double>(m - 1)) * sum;
}

}  // namespace ballast::text
