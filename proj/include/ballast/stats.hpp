#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ballast/core/dataset.hpp"

namespace ballast::stats {

inline constexpr std::size_t kDefaultBins = 16;

// Integer codes for a column: -1 marks missing cells, valid codes are dense
// in [0, n_levels).
struct Discretized {
  std::vector<std::int32_t> codes;
  std::size_t n_levels = 0;
};

// Equal-frequency binning by rank. Tied values always share a bin; with
// distinct values the bin populations differ by at most one.
Discretized quantile_bins(std::span<const double> values, std::span<const std::uint8_t> missing,
                          std::size_t bins);

// Numeric columns are quantile-binned; categorical and text columns use their
// distinct values directly.
Discretized discretize(const FeatureColumn& column, std::size_t bins);
// Every distinct value is its own level, numeric columns included.
Discretized discretize_exact(const FeatureColumn& column);
Discretized discretize_target(const Target& target, std::optional<std::size_t> bins);

// Plug-in entropy in bits of a count vector; zero counts contribute nothing.
double entropy_from_counts(std::span<const double> counts);

double shannon_entropy(const FeatureColumn& column, std::size_t bins = kDefaultBins);
double normalized_entropy(const FeatureColumn& column, std::size_t bins = kDefaultBins);

// Entropy and occupied-level count from discrete codes.
struct EntropyResult {
  double bits = 0.0;
  std::size_t occupied = 0;
  double normalized() const;
};
EntropyResult entropy_of_codes(const Discretized& codes);

enum class MiEstimator { PluginCategorical, QuantileBinned };

struct MiOptions {
  MiEstimator estimator = MiEstimator::QuantileBinned;
  std::size_t bins = kDefaultBins;
};

// Plug-in mutual information in bits of a joint count table (rows: X,
// columns: Y). Clipped at zero.
double mutual_information_table(const std::vector<std::vector<double>>& counts);

// Rows where either code is -1 are dropped pairwise.
double mutual_information_codes(const Discretized& x, const Discretized& y);

double mutual_information(const FeatureColumn& column, const Target& target,
                          const MiOptions& options = {});

// Population variance over non-missing cells. Categorical and text columns
// report 1 - sum p_k^2, the total variance of their one-hot encoding.
double variance(const FeatureColumn& column);

// Fraction of rows that are missing or exactly zero.
double sparsity(const FeatureColumn& column);

struct FeatureProfile {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  double entropy_bits = 0.0;
  double norm_entropy = 0.0;
  double variance = 0.0;
  double sparsity = 0.0;
  std::optional<double> mi_bits;
  bool empty_support = false;  // every cell missing
};

struct ProfileOptions {
  std::size_t bins = kDefaultBins;
  MiOptions mi;
  std::size_t threads = 1;
};

// An all-missing column yields a zero profile with `empty_support` set
// instead of an error, so one dead column does not abort a whole report.
FeatureProfile profile_feature(const FeatureColumn& column, const Target* target,
                               const ProfileOptions& options);
std::vector<FeatureProfile> profile_dataset(const Dataset& data, const ProfileOptions& options);

}  // namespace ballast::stats
