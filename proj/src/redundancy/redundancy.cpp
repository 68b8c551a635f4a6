#include "ballast/redundancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ballast/error.hpp"
#include "ballast/parallel.hpp"

namespace ballast::redundancy {

namespace {

constexpr double kMeanTieTolerance = 1e-12;

bool means_tied(double a, double b) {
  return std::abs(a - b) <= kMeanTieTolerance * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

double kl_to_mixture(std::span<const double> p, std::span<const double> m) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log2(p[i] / m[i]);
  }
  return kl;
}

void check_distribution(std::span<const double> p, const char* name) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw DataError(std::string("negative mass in distribution ") + name);
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DataError(std::string("distribution ") + name + " does not sum to 1");
  }
}

}  // namespace

double CorrelationMatrix::mean_abs(std::size_t i) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (j == i || !is_valid(i, j)) continue;
    sum += std::abs(at(i, j));
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double CorrelationMatrix::max_abs(std::size_t i) const {
  double best = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    if (j != i && is_valid(i, j)) best = std::max(best, std::abs(at(i, j)));
  }
  return best;
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t start = 0; start < n;) {
    std::size_t end = start;
    while (end < n && values[order[end]] == values[order[start]]) ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (std::size_t r = start; r < end; ++r) ranks[order[r]] = rank;
    start = end;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y, bool& ok) {
  ok = false;
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  ok = true;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y, bool& ok) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry, ok);
}

CorrelationMatrix correlation_matrix(const Dataset& data, CorrelationMethod method,
                                     std::size_t threads) {
  CorrelationMatrix m;
  m.method = method;
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    if (data.column(j).kind == ColumnKind::Numeric) {
      m.names.push_back(data.column(j).name);
      m.column_index.push_back(j);
    }
  }
  const std::size_t k = m.size();
  m.values.assign(k * k, 0.0);
  m.valid.assign(k * k, 0);

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) pairs.emplace_back(a, b);
  }
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    const auto [a, b] = pairs[p];
    const auto& ca = data.column(m.column_index[a]);
    const auto& cb = data.column(m.column_index[b]);
    std::vector<double> x, y;
    x.reserve(data.n_rows());
    y.reserve(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
      if (ca.is_missing(i) || cb.is_missing(i)) continue;
      x.push_back(ca.numeric[i]);
      y.push_back(cb.numeric[i]);
    }
    bool ok = false;
    double r = method == CorrelationMethod::Pearson ? pearson(x, y, ok) : spearman(x, y, ok);
    if (ok && a == b) r = 1.0;
    m.values[a * k + b] = m.values[b * k + a] = ok ? r : 0.0;
    m.valid[a * k + b] = m.valid[b * k + a] = ok ? 1 : 0;
  });
  return m;
}

FilterResult correlation_filter(const CorrelationMatrix& matrix, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw ConfigError("correlation threshold must lie in (0, 1]");
  }
  const std::size_t k = matrix.size();
  std::vector<double> mean(k);
  for (std::size_t i = 0; i < k; ++i) mean[i] = matrix.mean_abs(i);

  // Loser of a pair: higher mean |r|, or the later index on a tie.
  const auto loser = [&](std::size_t a, std::size_t b) {
    if (means_tied(mean[a], mean[b])) return std::max(a, b);
    return mean[a] > mean[b] ? a : b;
  };

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (means_tied(mean[a], mean[b])) return a < b;
    return mean[a] > mean[b];
  });

  std::vector<std::uint8_t> dropped(k, 0);
  for (std::size_t i : order) {
    if (dropped[i]) continue;
    for (std::size_t j = 0; j < k && !dropped[i]; ++j) {
      if (j == i || dropped[j] || !matrix.is_valid(i, j)) continue;
      if (std::abs(matrix.at(i, j)) > threshold) dropped[loser(i, j)] = 1;
    }
  }

  FilterResult result;
  for (std::size_t i = 0; i < k; ++i) (dropped[i] ? result.dropped : result.kept).push_back(i);
  return result;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("cosine similarity needs equal-length vectors");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw DataError("cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double iou(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double iou(std::span<const std::string> a, std::span<const std::string> b) {
  return iou(std::set<std::string>(a.begin(), a.end()), std::set<std::string>(b.begin(), b.end()));
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw DataError("JS divergence needs equal support sizes");
  check_distribution(p, "p");
  check_distribution(q, "q");
  std::vector<double> mix(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) mix[i] = 0.5 * (p[i] + q[i]);
  const double js = 0.5 * kl_to_mixture(p, mix) + 0.5 * kl_to_mixture(q, mix);
  return std::clamp(js, 0.0, 1.0);
}

}  // namespace ballast::redundancy
