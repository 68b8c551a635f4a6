#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ballast/core/dataset.hpp"

namespace ballast::redundancy {

enum class CorrelationMethod { Pearson, Spearman };

// Symmetric correlation matrix over the numeric columns of a dataset.
// Degenerate pairs (fewer than two complete rows, or a constant side) are
// marked invalid and hold 0.
struct CorrelationMatrix {
  CorrelationMethod method = CorrelationMethod::Pearson;
  std::vector<std::string> names;
  std::vector<std::size_t> column_index;  // position of each entry in the source dataset
  std::vector<double> values;             // row-major size() x size()
  std::vector<std::uint8_t> valid;

  std::size_t size() const noexcept { return names.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  bool is_valid(std::size_t i, std::size_t j) const { return valid[i * size() + j] != 0; }

  // Mean |r| over the valid off-diagonal entries of row i (0 when none).
  double mean_abs(std::size_t i) const;
  // Largest valid off-diagonal |r| of row i (0 when none).
  double max_abs(std::size_t i) const;
};

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Correlation of two complete samples. `ok` is false (and the result 0) when
// n < 2 or either side is constant.
double pearson(std::span<const double> x, std::span<const double> y, bool& ok);
double spearman(std::span<const double> x, std::span<const double> y, bool& ok);

// Uses pairwise-complete rows for every pair. Non-numeric columns are skipped.
CorrelationMatrix correlation_matrix(const Dataset& data, CorrelationMethod method,
                                     std::size_t threads = 1);

struct FilterResult {
  std::vector<std::size_t> kept;     // indices into the matrix, ascending
  std::vector<std::size_t> dropped;  // indices into the matrix, ascending
};

// Greedy pruning: features are visited by descending mean |r|; whenever a pair
// exceeds `threshold` (strictly), the member with the higher mean |r| is
// dropped. Means within 1e-12 count as equal and the later feature is dropped.
FilterResult correlation_filter(const CorrelationMatrix& matrix, double threshold);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

// |A ∩ B| / |A ∪ B|; two empty sets give 0.
double iou(const std::set<std::string>& a, const std::set<std::string>& b);
double iou(std::span<const std::string> a, std::span<const std::string> b);

// Jensen-Shannon divergence in bits, in [0, 1]. Both inputs must be
// probability vectors of equal length (sum 1 within 1e-9).
double js_divergence(std::span<const double> p, std::span<const double> q);

}  // namespace ballast::redundancy
