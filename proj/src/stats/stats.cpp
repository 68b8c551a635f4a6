#include "ballast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "ballast/error.hpp"
#include "ballast/parallel.hpp"

namespace ballast::stats {

namespace {

void require_support(const FeatureColumn& column) {
  if (column.missing_count() == column.size()) {
    throw DataError("empty support: column '" + column.name + "' has no non-missing cells");
  }
}

template <typename Key>
Discretized codes_from_keys(const std::vector<Key>& keys, std::span<const std::uint8_t> missing) {
  Discretized d;
  d.codes.assign(keys.size(), -1);
  std::map<Key, std::int32_t> lookup;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (missing[i]) continue;
    lookup.emplace(keys[i], 0);
  }
  std::int32_t next = 0;
  for (auto& [key, code] : lookup) code = next++;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!missing[i]) d.codes[i] = lookup.at(keys[i]);
  }
  d.n_levels = lookup.size();
  return d;
}

}  // namespace

Discretized quantile_bins(std::span<const double> values, std::span<const std::uint8_t> missing,
                          std::size_t bins) {
  if (bins < 2) throw ConfigError("quantile binning needs at least 2 bins");
  Discretized d;
  d.codes.assign(values.size(), -1);

  std::vector<std::size_t> order;
  order.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!missing[i]) order.push_back(i);
  }
  const std::size_t n = order.size();
  if (n == 0) return d;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // A run of equal values takes the bin of its first rank.
  std::int32_t last_bin = -1;
  std::int32_t dense = -1;
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    const auto bin = static_cast<std::int32_t>(start * bins / n);
    if (bin != last_bin) {
      ++dense;
      last_bin = bin;
    }
    for (std::size_t r = start; r < end; ++r) d.codes[order[r]] = dense;
    start = end;
  }
  d.n_levels = static_cast<std::size_t>(dense + 1);
  return d;
}

Discretized discretize(const FeatureColumn& column, std::size_t bins) {
  switch (column.kind) {
    case ColumnKind::Numeric:
      return quantile_bins(column.numeric, column.missing, bins);
    case ColumnKind::Categorical:
      return codes_from_keys(column.codes, column.missing);
    case ColumnKind::Text:
      return codes_from_keys(column.text, column.missing);
  }
  return {};
}

Discretized discretize_exact(const FeatureColumn& column) {
  if (column.kind == ColumnKind::Numeric) return codes_from_keys(column.numeric, column.missing);
  return discretize(column, kDefaultBins);
}

Discretized discretize_target(const Target& target, std::optional<std::size_t> bins) {
  const std::vector<std::uint8_t> none(target.size(), 0);
  if (target.kind == TargetKind::Classification) {
    Discretized d;
    d.codes = target.class_codes();
    d.n_levels = target.class_count();
    return d;
  }
  if (bins) return quantile_bins(target.values, none, *bins);
  return codes_from_keys(target.values, none);
}

double entropy_from_counts(std::span<const double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c <= 0.0) continue;
    const double p = c / total;
    h -= p * std::log2(p);
  }
  return std::max(h, 0.0);
}

double EntropyResult::normalized() const {
  if (occupied <= 1) return 0.0;
  return std::clamp(bits / std::log2(static_cast<double>(occupied)), 0.0, 1.0);
}

EntropyResult entropy_of_codes(const Discretized& codes) {
  std::vector<double> counts(codes.n_levels, 0.0);
  for (auto c : codes.codes) {
    if (c >= 0) counts[static_cast<std::size_t>(c)] += 1.0;
  }
  EntropyResult r;
  r.occupied = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0.0; }));
  r.bits = r.occupied <= 1 ? 0.0 : entropy_from_counts(counts);
  return r;
}

double shannon_entropy(const FeatureColumn& column, std::size_t bins) {
  require_support(column);
  return entropy_of_codes(discretize(column, bins)).bits;
}

double normalized_entropy(const FeatureColumn& column, std::size_t bins) {
  require_support(column);
  return entropy_of_codes(discretize(column, bins)).normalized();
}

double mutual_information_table(const std::vector<std::vector<double>>& counts) {
  double total = 0.0;
  std::vector<double> row_sums(counts.size(), 0.0);
  std::vector<double> col_sums;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (col_sums.size() < counts[i].size()) col_sums.resize(counts[i].size(), 0.0);
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      if (counts[i][j] < 0.0) throw DataError("negative count in contingency table");
      row_sums[i] += counts[i][j];
      col_sums[j] += counts[i][j];
      total += counts[i][j];
    }
  }
  if (total <= 0.0) return 0.0;
  double mi = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      const double c = counts[i][j];
      if (c <= 0.0) continue;
      mi += (c / total) * std::log2(c * total / (row_sums[i] * col_sums[j]));
    }
  }
  return std::max(mi, 0.0);
}

double mutual_information_codes(const Discretized& x, const Discretized& y) {
  if (x.codes.size() != y.codes.size()) throw DataError("MI inputs differ in length");
  std::vector<std::vector<double>> table(x.n_levels, std::vector<double>(y.n_levels, 0.0));
  for (std::size_t i = 0; i < x.codes.size(); ++i) {
    const auto a = x.codes[i];
    const auto b = y.codes[i];
    if (a < 0 || b < 0) continue;
    table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] += 1.0;
  }
  return mutual_information_table(table);
}

double mutual_information(const FeatureColumn& column, const Target& target,
                          const MiOptions& options) {
  if (column.size() != target.size()) throw DataError("column and target differ in length");
  const bool binned = options.estimator == MiEstimator::QuantileBinned;
  const Discretized y = discretize_target(target, binned ? std::optional(options.bins) : std::nullopt);
  if (entropy_of_codes(y).occupied < 2) throw DataError("degenerate target: only one value present");
  const Discretized x = binned ? discretize(column, options.bins) : discretize_exact(column);
  return mutual_information_codes(x, y);
}

double variance(const FeatureColumn& column) {
  require_support(column);
  if (column.kind != ColumnKind::Numeric) {
    const auto d = discretize(column, kDefaultBins);
    std::vector<double> counts(d.n_levels, 0.0);
    double total = 0.0;
    for (auto c : d.codes) {
      if (c >= 0) {
        counts[static_cast<std::size_t>(c)] += 1.0;
        total += 1.0;
      }
    }
    double sum_sq = 0.0;
    for (double c : counts) sum_sq += (c / total) * (c / total);
    return std::max(0.0, 1.0 - sum_sq);
  }
  // Two-pass for accuracy.
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!column.is_missing(i)) {
      sum += column.numeric[i];
      ++n;
    }
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!column.is_missing(i)) {
      const double d = column.numeric[i] - mean;
      ss += d * d;
    }
  }
  return ss / static_cast<double>(n);
}

double sparsity(const FeatureColumn& column) {
  if (column.size() == 0) throw DataError("empty support: column '" + column.name + "' has no rows");
  std::size_t empty = 0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column.is_missing(i) ||
        (column.kind == ColumnKind::Numeric && column.numeric[i] == 0.0)) {
      ++empty;
    }
  }
  return static_cast<double>(empty) / static_cast<double>(column.size());
}

FeatureProfile profile_feature(const FeatureColumn& column, const Target* target,
                               const ProfileOptions& options) {
  FeatureProfile p;
  p.name = column.name;
  p.kind = column.kind;
  p.sparsity = column.size() == 0 ? 1.0 : sparsity(column);
  if (column.missing_count() == column.size()) {
    p.empty_support = true;
    if (target) p.mi_bits = 0.0;
    return p;
  }
  const auto h = entropy_of_codes(discretize(column, options.bins));
  p.entropy_bits = h.bits;
  p.norm_entropy = h.normalized();
  p.variance = variance(column);
  if (target) p.mi_bits = mutual_information(column, *target, options.mi);
  return p;
}

std::vector<FeatureProfile> profile_dataset(const Dataset& data, const ProfileOptions& options) {
  const Target* target = data.has_target() ? &*data.target() : nullptr;
  if (target) {
    const bool binned = options.mi.estimator == MiEstimator::QuantileBinned;
    const auto y = discretize_target(*target, binned ? std::optional(options.mi.bins) : std::nullopt);
    if (entropy_of_codes(y).occupied < 2) throw DataError("degenerate target: only one value present");
  }
  std::vector<FeatureProfile> out(data.n_features());
  parallel_for(data.n_features(), options.threads, [&](std::size_t j) {
    out[j] = profile_feature(data.column(j), target, options);
  });
  return out;
}

}  // namespace ballast::stats
