#include "ballast/text/textrank.hpp"

#include <cmath>

#include "ballast/error.hpp"

namespace ballast::text {

std::vector<double> textrank_from_similarity(const std::vector<double>& similarity, std::size_t n,
                                             const TextRankOptions& options) {
  if (n == 0) throw DataError("TextRank needs at least one sentence");
  if (similarity.size() != n * n) throw DataError("similarity matrix size does not match n");
  if (!(options.damping >= 0.0 && options.damping <= 1.0)) {
    throw ConfigError("damping must lie in [0, 1]");
  }

  std::vector<double> weight(n * n, 0.0);
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double s = similarity[i * n + j];
      if (i == j || s <= 0.0 || s < options.sim_floor) continue;
      weight[i * n + j] = s;
      out_weight[i] += s;
    }
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> rank(n, inv_n);
  std::vector<double> next(n);
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (out_weight[i] == 0.0) dangling += rank[i];
    }
    const double base = (1.0 - options.damping) * inv_n + options.damping * dangling * inv_n;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t i = 0; i < n; ++i) {
      if (out_weight[i] == 0.0) continue;
      const double share = options.damping * rank[i] / out_weight[i];
      for (std::size_t j = 0; j < n; ++j) next[j] += share * weight[i * n + j];
    }
    double total = 0.0;
    for (double v : next) total += v;
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= total;
      change += std::abs(next[i] - rank[i]);
    }
    rank.swap(next);
    if (change < options.tolerance) break;
  }
  return rank;
}

std::vector<double> textrank(const SparseMatrix& sentence_vectors, const TextRankOptions& options) {
  const std::size_t n = sentence_vectors.n_rows;
  std::vector<double> norms(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : sentence_vectors.row_values(i)) norms[i] += v * v;
    norms[i] = std::sqrt(norms[i]);
  }
  std::vector<double> dense_row(sentence_vectors.n_cols, 0.0);
  std::vector<double> sim(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (norms[i] == 0.0) continue;
    const auto ci = sentence_vectors.row_cols(i);
    const auto vi = sentence_vectors.row_values(i);
    for (std::size_t k = 0; k < ci.size(); ++k) dense_row[ci[k]] = vi[k];
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || norms[j] == 0.0) continue;
      double dot = 0.0;
      const auto cj = sentence_vectors.row_cols(j);
      const auto vj = sentence_vectors.row_values(j);
      for (std::size_t k = 0; k < cj.size(); ++k) dot += dense_row[cj[k]] * vj[k];
      sim[i * n + j] = dot / (norms[i] * norms[j]);
    }
    for (auto c : ci) dense_row[c] = 0.0;
  }
  return textrank_from_similarity(sim, n, options);
}

}  // namespace ballast::text
