#include "ballast/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "ballast/error.hpp"
#include "ballast/random.hpp"
#include "ballast/stats.hpp"

namespace ballast::select {

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

void require_finite(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (!x.allFinite() || !y.allFinite()) throw DataError("lasso inputs must be finite");
  if (x.rows() != y.size()) throw DataError("design and response differ in row count");
  if (x.rows() == 0) throw DataError("lasso needs at least one row");
}

struct Prepared {
  Standardized design;
  Eigen::VectorXd y;  // centered
  double y_mean = 0.0;
};

Prepared prepare(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  require_finite(x, y);
  Prepared p;
  p.design = standardize(x);
  p.y_mean = y.mean();
  p.y = y.array() - p.y_mean;
  return p;
}

// Runs coordinate descent from `beta` in place.
void descend(const Prepared& p, double lambda, const LassoOptions& options, Eigen::VectorXd& beta,
             std::size_t& sweeps, bool& converged) {
  const auto& xs = p.design.x;
  const double n = static_cast<double>(xs.rows());
  Eigen::VectorXd residual = p.y - xs * beta;
  sweeps = 0;
  converged = false;
  while (sweeps < options.max_sweeps) {
    ++sweeps;
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < xs.cols(); ++j) {
      if (p.design.scale[j] == 0.0) continue;
      const double old = beta[j];
      // Columns have unit mean square, so the coordinate minimizer is a plain
      // soft-threshold of the partial-residual correlation.
      const double rho = xs.col(j).dot(residual) / n + old;
      const double updated = soft_threshold(rho, lambda);
      if (updated != old) {
        residual.noalias() -= (updated - old) * xs.col(j);
        beta[j] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    if (max_change < options.tolerance) {
      converged = true;
      break;
    }
  }
}

LassoFit finish(const Prepared& p, double lambda, Eigen::VectorXd beta, std::size_t sweeps,
                bool converged) {
  LassoFit fit;
  fit.lambda = lambda;
  fit.iterations_used = sweeps;
  fit.converged = converged;
  fit.original_coefficients = Eigen::VectorXd::Zero(beta.size());
  double shift = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (p.design.scale[j] == 0.0) continue;
    fit.original_coefficients[j] = beta[j] / p.design.scale[j];
    shift += fit.original_coefficients[j] * p.design.mean[j];
  }
  fit.intercept = p.y_mean - shift;
  fit.coefficients = std::move(beta);
  return fit;
}

double squared_distance(const Eigen::MatrixXd& x, Eigen::Index row, const Eigen::MatrixXd& c,
                        Eigen::Index center) {
  return (x.row(row) - c.row(center)).squaredNorm();
}

}  // namespace

Selection variance_filter(const Dataset& data, double threshold) {
  Selection s;
  for (const auto& col : data.columns()) {
    const bool empty = col.missing_count() == col.size();
    const bool keep = !empty && stats::variance(col) > threshold;
    (keep ? s.kept : s.dropped).push_back(col.name);
  }
  return s;
}

Eigen::MatrixXd numeric_matrix(const Dataset& data, std::vector<std::size_t>* columns) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < data.n_features(); ++j) {
    if (data.column(j).kind == ColumnKind::Numeric) idx.push_back(j);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(data.n_rows()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t c = 0; c < idx.size(); ++c) {
    const auto& col = data.column(idx[c]);
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (!col.is_missing(i)) {
        sum += col.numeric[i];
        ++present;
      }
    }
    const double fill = present ? sum / static_cast<double>(present) : 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
          col.is_missing(i) ? fill : col.numeric[i];
    }
  }
  if (columns) *columns = std::move(idx);
  return x;
}

Standardized standardize(const Eigen::MatrixXd& x) {
  Standardized s;
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.scale = Eigen::VectorXd::Zero(x.cols());
  s.x = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Eigen::VectorXd centered = x.col(j).array() - s.mean[j];
    const double sd = std::sqrt(centered.squaredNorm() / n);
    if (sd > 0.0) {
      s.scale[j] = sd;
      s.x.col(j) = centered / sd;
    }
  }
  return s;
}

double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Prepared p = prepare(x, y);
  const double n = static_cast<double>(x.rows());
  double best = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    best = std::max(best, std::abs(p.design.x.col(j).dot(p.y)) / n);
  }
  return best;
}

LassoFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& options) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  const Prepared p = prepare(x, y);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  std::size_t sweeps = 0;
  bool converged = false;
  descend(p, lambda, options, beta, sweeps, converged);
  return finish(p, lambda, std::move(beta), sweeps, converged);
}

double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda) {
  const Prepared p = prepare(x, y);
  const double n = static_cast<double>(x.rows());
  return (p.y - p.design.x * beta).squaredNorm() / (2.0 * n) + lambda * beta.lpNorm<1>();
}

std::vector<std::size_t> lasso_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      double lambda, const LassoOptions& options) {
  const auto fit = lasso_fit(x, y, lambda, options);
  std::vector<std::size_t> kept;
  for (Eigen::Index j = 0; j < fit.coefficients.size(); ++j) {
    if (fit.coefficients[j] != 0.0) kept.push_back(static_cast<std::size_t>(j));
  }
  return kept;
}

std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 std::size_t n_lambdas, const LassoOptions& options) {
  if (n_lambdas < 2) throw ConfigError("lasso path needs at least two lambdas");
  const Prepared p = prepare(x, y);
  const double n = static_cast<double>(x.rows());
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    lambda_max = std::max(lambda_max, std::abs(p.design.x.col(j).dot(p.y)) / n);
  }
  std::vector<LassoFit> path;
  path.reserve(n_lambdas);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(x.cols());
  const double log_hi = 0.0;
  const double log_lo = std::log(1e-4);
  for (std::size_t i = 0; i < n_lambdas; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_lambdas - 1);
    const double lambda = lambda_max * std::exp(log_hi + t * (log_lo - log_hi));
    std::size_t sweeps = 0;
    bool converged = false;
    descend(p, lambda, options, beta, sweeps, converged);
    path.push_back(finish(p, lambda, beta, sweeps, converged));
  }
  return path;
}

PcaFit pca_fit(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw DataError("PCA needs at least two rows");
  if (!x.allFinite()) throw DataError("PCA input must be finite");
  PcaFit fit;
  fit.mean = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - fit.mean.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(x.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw DataError("PCA eigendecomposition failed");
  const Eigen::Index m = x.cols();
  fit.components.resize(m, m);
  fit.explained_variance.resize(m);
  // Eigen returns ascending eigenvalues.
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index src = m - 1 - k;
    fit.explained_variance[k] = std::max(0.0, solver.eigenvalues()[src]);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0.0) v = -v;
    fit.components.row(k) = v.transpose();
  }
  const double total = fit.explained_variance.sum();
  if (total <= 0.0) throw DataError("PCA input has zero variance");
  fit.explained_ratio = fit.explained_variance / total;
  return fit;
}

std::size_t pca_select(const PcaFit& fit, double variance_frac) {
  if (!(variance_frac > 0.0 && variance_frac <= 1.0)) {
    throw ConfigError("variance fraction must lie in (0, 1]");
  }
  double cumulative = 0.0;
  const auto m = static_cast<std::size_t>(fit.explained_ratio.size());
  for (std::size_t k = 0; k < m; ++k) {
    cumulative += fit.explained_ratio[static_cast<Eigen::Index>(k)];
    // Slack absorbs rounding when the fraction is 1.
    if (cumulative >= variance_frac - 1e-12) return k + 1;
  }
  return m;
}

Eigen::MatrixXd pca_transform(const PcaFit& fit, const Eigen::MatrixXd& x, std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(std::min<std::size_t>(k, fit.components.rows()));
  const Eigen::MatrixXd centered = x.rowwise() - fit.mean.transpose();
  return centered * fit.components.topRows(kk).transpose();
}

KMeansResult kmeans(const Eigen::MatrixXd& x, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (k == 0) throw ConfigError("k-means needs k >= 1");
  if (k > n) throw ConfigError("k-means k=" + std::to_string(k) + " exceeds row count " + std::to_string(n));
  const auto kk = static_cast<Eigen::Index>(k);

  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids.resize(kk, x.cols());

  // k-means++ seeding.
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = uniform_index(rng, n);
  r.centroids.row(0) = x.row(static_cast<Eigen::Index>(first));
  for (Eigen::Index c = 1; c < kk; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(x, static_cast<Eigen::Index>(i), r.centroids, c - 1));
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total <= 0.0) {
      pick = uniform_index(rng, n);
    } else {
      const double u = unit_uniform(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > u) {
          pick = i;
          break;
        }
      }
    }
    r.centroids.row(c) = x.row(static_cast<Eigen::Index>(pick));
  }

  r.assignments.assign(n, 0);
  const auto assign = [&] {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (Eigen::Index c = 0; c < kk; ++c) {
        const double d = squared_distance(x, static_cast<Eigen::Index>(i), r.centroids, c);
        if (d < best) {
          best = d;
          arg = static_cast<std::size_t>(c);
        }
      }
      r.assignments[i] = arg;
      inertia += best;
    }
    return inertia;
  };

  for (r.iterations = 0; r.iterations < options.max_iterations;) {
    r.inertia_history.push_back(assign());
    ++r.iterations;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(kk, x.cols());
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(r.assignments[i])) += x.row(static_cast<Eigen::Index>(i));
      ++counts[r.assignments[i]];
    }
    double shift = 0.0;
    for (Eigen::Index c = 0; c < kk; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;  // empty cluster keeps its centroid
      const Eigen::RowVectorXd updated = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      shift = std::max(shift, (updated - r.centroids.row(c)).norm());
      r.centroids.row(c) = updated;
    }
    if (shift <= options.tolerance) {
      r.converged = true;
      break;
    }
  }
  r.inertia = assign();
  r.inertia_history.push_back(r.inertia);
  return r;
}

Selection mi_retention_select(const SignalTable& signals, const RetentionRule& rule,
                              std::string_view mi_signal) {
  if (rule.top_k.has_value() == rule.min_mi.has_value()) {
    throw ConfigError("MI retention needs exactly one of top_k or min_mi");
  }
  const auto& features = signals.features();
  const auto mi = signals.raw_column(mi_signal);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mi[a] > mi[b]; });

  std::vector<std::uint8_t> keep(features.size(), 0);
  if (rule.top_k) {
    for (std::size_t r = 0; r < std::min(*rule.top_k, order.size()); ++r) keep[order[r]] = 1;
  } else {
    for (std::size_t j = 0; j < features.size(); ++j) keep[j] = mi[j] >= *rule.min_mi ? 1 : 0;
  }
  Selection s;
  for (std::size_t j = 0; j < features.size(); ++j) (keep[j] ? s.kept : s.dropped).push_back(features[j]);
  if (s.kept.empty()) s.warnings.push_back("MI retention kept no features");
  return s;
}

Selection external_importance_select(const SignalTable& signals, std::string_view signal,
                                     double threshold) {
  const auto& features = signals.features();
  const auto values = signals.raw_column(signal);
  Selection s;
  for (std::size_t j = 0; j < features.size(); ++j) {
    (values[j] >= threshold ? s.kept : s.dropped).push_back(features[j]);
  }
  if (s.kept.empty()) {
    s.warnings.push_back("no feature reaches " + std::string(signal) + " >= " +
                         std::to_string(threshold) + "; kept set is empty");
  }
  return s;
}

}  // namespace ballast::select
