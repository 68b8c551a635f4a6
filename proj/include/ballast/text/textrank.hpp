#pragma once

#include <cstddef>
#include <vector>

#include "ballast/core/sparse.hpp"

namespace ballast::text {

struct TextRankOptions {
  double sim_floor = 0.05;  // edges with similarity below this are dropped
  double damping = 0.85;
  double tolerance = 1e-6;  // L1 change between iterations
  std::size_t max_iterations = 1000;
};

// PageRank over a weighted similarity graph given as a dense symmetric n x n
// matrix (row-major). Self-similarities are ignored. Nodes without edges
// spread their mass uniformly, so the result always sums to 1.
std::vector<double> textrank_from_similarity(const std::vector<double>& similarity, std::size_t n,
                                             const TextRankOptions& options = {});

// Sentences as rows of a term matrix; similarity is cosine between rows.
std::vector<double> textrank(const SparseMatrix& sentence_vectors,
                             const TextRankOptions& options = {});

}  // namespace ballast::text
