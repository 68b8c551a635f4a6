#include "ballast/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "ballast/core/csv.hpp"
#include "ballast/error.hpp"
#include "ballast/parallel.hpp"
#include "ballast/random.hpp"
#include "ballast/redundancy.hpp"
#include "ballast/score.hpp"

namespace ballast::harness {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

Eigen::VectorXd take(const std::vector<double>& v, std::span<const std::size_t> rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

struct Confusion {
  double tp = 0, fp = 0, fn = 0;
  double precision() const { return tp + fp > 0 ? tp / (tp + fp) : 0.0; }
  double recall() const { return tp + fn > 0 ? tp / (tp + fn) : 0.0; }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
};

std::size_t distinct_classes(const Eigen::VectorXd& y) {
  std::vector<double> v(y.data(), y.data() + y.size());
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

Metrics classify(const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr, const Eigen::MatrixXd& xte,
                 const Eigen::VectorXd& yte, std::size_t n_classes, const LogisticOptions& options) {
  Metrics m;
  m.kind = TargetKind::Classification;
  const auto n = static_cast<std::size_t>(yte.size());

  if (n_classes == 2) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = fit_logistic(xtr, ytr, options);
    m.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const Eigen::VectorXd p = predict_proba(model, xte);
    std::vector<double> scores(p.data(), p.data() + p.size());
    std::vector<int> labels(n);
    Confusion c;
    double correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = yte[static_cast<Eigen::Index>(i)] == 1.0 ? 1 : 0;
      const int pred = scores[i] >= 0.5 ? 1 : 0;
      correct += pred == labels[i];
      if (pred == 1 && labels[i] == 1) ++c.tp;
      if (pred == 1 && labels[i] == 0) ++c.fp;
      if (pred == 0 && labels[i] == 1) ++c.fn;
    }
    m.auc = compute_auc(scores, labels);
    m.accuracy = correct / static_cast<double>(n);
    m.precision = c.precision();
    m.recall = c.recall();
    m.f1 = c.f1();
    return m;
  }

  // One-vs-rest.
  Eigen::MatrixXd proba(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_classes));
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < n_classes; ++k) {
    const Eigen::VectorXd yk = (ytr.array() == static_cast<double>(k)).cast<double>();
    const auto model = fit_logistic(xtr, yk, options);
    proba.col(static_cast<Eigen::Index>(k)) = predict_proba(model, xte);
  }
  m.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<Confusion> per(n_classes);
  double correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index arg = 0;
    proba.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
    const auto truth = static_cast<std::size_t>(yte[static_cast<Eigen::Index>(i)]);
    const auto pred = static_cast<std::size_t>(arg);
    if (pred == truth) {
      ++correct;
      ++per[truth].tp;
    } else {
      ++per[pred].fp;
      ++per[truth].fn;
    }
  }
  double auc_sum = 0, p_sum = 0, r_sum = 0, f_sum = 0;
  std::size_t auc_classes = 0, classes = 0;
  for (std::size_t k = 0; k < n_classes; ++k) {
    const auto& c = per[k];
    if (c.tp + c.fp + c.fn == 0) continue;  // absent from test and never predicted
    ++classes;
    p_sum += c.precision();
    r_sum += c.recall();
    f_sum += c.f1();
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = proba(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
      labels[i] = static_cast<std::size_t>(yte[static_cast<Eigen::Index>(i)]) == k;
      pos += labels[i];
    }
    if (pos > 0 && pos < n) {
      auc_sum += compute_auc(scores, labels);
      ++auc_classes;
    }
  }
  m.accuracy = correct / static_cast<double>(n);
  m.precision = p_sum / static_cast<double>(classes);
  m.recall = r_sum / static_cast<double>(classes);
  m.f1 = f_sum / static_cast<double>(classes);
  m.auc = auc_classes ? auc_sum / static_cast<double>(auc_classes) : kNotApplicable;
  return m;
}

Metrics regress(const Eigen::MatrixXd& xtr, const Eigen::VectorXd& ytr, const Eigen::MatrixXd& xte,
                const Eigen::VectorXd& yte) {
  Metrics m;
  m.kind = TargetKind::Regression;
  const auto t0 = std::chrono::steady_clock::now();
  const double y_mean = ytr.mean();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(xtr.cols());
  if (xtr.cols() > 0) {
    // Minimum-norm least squares; zeroed constant columns are harmless.
    w = xtr.completeOrthogonalDecomposition().solve((ytr.array() - y_mean).matrix());
  }
  m.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const Eigen::VectorXd pred = (xte * w).array() + y_mean;
  const double sse = (yte - pred).squaredNorm();
  const double sst = (yte.array() - yte.mean()).matrix().squaredNorm();
  m.mse = sse / static_cast<double>(yte.size());
  m.r2 = sst > 0.0 ? 1.0 - sse / sst : (sse == 0.0 ? 1.0 : 0.0);
  return m;
}

std::string cell(double v) { return std::isnan(v) ? std::string() : format_number(v); }

}  // namespace

Split make_split(std::size_t n_rows, std::uint64_t seed, double train_frac) {
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
  const auto order = shuffled_indices(n_rows, seed);
  auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(n_rows)));
  n_train = std::min(n_train, n_rows);
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

double compute_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw DataError("AUC scores and labels differ in length");
  double n_pos = 0, n_neg = 0;
  for (int l : labels) {
    if (l == 1) ++n_pos;
    else if (l == 0) ++n_neg;
    else throw DataError("AUC labels must be 0 or 1");
  }
  if (n_pos == 0 || n_neg == 0) throw DataError("AUC needs both classes present");
  const auto ranks = redundancy::average_ranks(scores);
  double rank_sum = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) rank_sum += ranks[i];
  }
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

Design encode_features(const Dataset& data) {
  Design d;
  const auto n = static_cast<Eigen::Index>(data.n_rows());
  std::vector<Eigen::VectorXd> cols;
  for (const auto& col : data.columns()) {
    if (col.kind == ColumnKind::Numeric) {
      Eigen::VectorXd v(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        v[i] = col.is_missing(static_cast<std::size_t>(i)) ? kNotApplicable : col.numeric[static_cast<std::size_t>(i)];
      }
      cols.push_back(std::move(v));
      d.names.push_back(col.name);
    } else if (col.kind == ColumnKind::Categorical && col.levels.size() <= kMaxOneHotLevels) {
      for (std::size_t level = 0; level < col.levels.size(); ++level) {
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          const auto code = col.codes[static_cast<std::size_t>(i)];
          v[i] = code < 0 ? kNotApplicable : (static_cast<std::size_t>(code) == level ? 1.0 : 0.0);
        }
        cols.push_back(std::move(v));
        d.names.push_back(col.name + "=" + col.levels[level]);
      }
    }
  }
  d.x.resize(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) d.x.col(static_cast<Eigen::Index>(j)) = cols[j];
  return d;
}

void prepare_design(Eigen::MatrixXd& x, std::span<const std::size_t> train_rows) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    double sum = 0;
    std::size_t present = 0;
    for (auto r : train_rows) {
      const double v = x(static_cast<Eigen::Index>(r), j);
      if (!std::isnan(v)) {
        sum += v;
        ++present;
      }
    }
    const double mean = present ? sum / static_cast<double>(present) : 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (std::isnan(x(i, j))) x(i, j) = mean;
    }
    double ss = 0;
    for (auto r : train_rows) {
      const double dv = x(static_cast<Eigen::Index>(r), j) - mean;
      ss += dv * dv;
    }
    const double sd = train_rows.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(train_rows.size()));
    if (sd > 0.0) {
      x.col(j) = (x.col(j).array() - mean) / sd;
    } else {
      x.col(j).setZero();
    }
  }
}

LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const LogisticOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (n == 0) throw DataError("logistic fit needs at least one row");
  const double nn = static_cast<double>(n);

  // Lipschitz constant of the gradient: lambda_max([X 1]'[X 1]) / (4n) + lambda.
  Eigen::MatrixXd gram(p + 1, p + 1);
  gram.topLeftCorner(p, p) = x.transpose() * x;
  const Eigen::VectorXd col_sums = x.colwise().sum().transpose();
  gram.topRightCorner(p, 1) = col_sums;
  gram.bottomLeftCorner(1, p) = col_sums.transpose();
  gram(p, p) = nn;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lipschitz = eig.eigenvalues().maxCoeff() / (4.0 * nn) + options.lambda;
  const double step = 1.0 / lipschitz;

  LogisticModel model;
  model.weights = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd residual(n);
  for (model.iterations = 0; model.iterations < options.max_iterations; ++model.iterations) {
    const Eigen::VectorXd z = (x * model.weights).array() + model.intercept;
    for (Eigen::Index i = 0; i < n; ++i) residual[i] = sigmoid(z[i]) - y[i];
    const Eigen::VectorXd gw = x.transpose() * residual / nn + options.lambda * model.weights;
    const double gb = residual.sum() / nn;
    model.gradient_norm = std::sqrt(gw.squaredNorm() + gb * gb);
    if (model.gradient_norm < options.gradient_tolerance) break;
    model.weights -= step * gw;
    model.intercept -= step * gb;
  }
  return model;
}

Eigen::VectorXd predict_proba(const LogisticModel& model, const Eigen::MatrixXd& x) {
  Eigen::VectorXd z = (x * model.weights).array() + model.intercept;
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = sigmoid(z[i]);
  return z;
}

Metrics train_eval(const Dataset& data, const Split& split, const LogisticOptions& options) {
  if (!data.has_target()) throw ConfigError("evaluation needs a target column");
  if (split.train.empty() || split.test.empty()) throw DataError("train/test split has an empty half");
  const Target& target = *data.target();

  Design design = encode_features(data);
  prepare_design(design.x, split.train);
  const Eigen::MatrixXd xtr = take_rows(design.x, split.train);
  const Eigen::MatrixXd xte = take_rows(design.x, split.test);
  const Eigen::VectorXd ytr = take(target.values, split.train);
  const Eigen::VectorXd yte = take(target.values, split.test);

  if (target.kind == TargetKind::Regression) return regress(xtr, ytr, xte, yte);

  if (distinct_classes(ytr) < 2 || distinct_classes(yte) < 2) {
    throw DataError("single-class split: a split half holds only one class; try another --seed");
  }
  return classify(xtr, ytr, xte, yte, target.class_count(), options);
}

Metrics train_eval(const Dataset& data, std::uint64_t split_seed, double train_frac) {
  return train_eval(data, make_split(data.n_rows(), split_seed, train_frac));
}

TradeoffCurve sweep(const Dataset& data, std::span<const double> scores, std::vector<double> taus,
                    const SweepOptions& options) {
  if (!data.has_target()) throw ConfigError("sweep needs a target column");
  if (taus.empty()) throw ConfigError("sweep needs at least one tau");
  for (double t : taus) {
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("sweep taus must lie in [0, 1]");
  }
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

  const Split split = make_split(data.n_rows(), options.seed, options.train_frac);
  TradeoffCurve curve;
  curve.kind = data.target()->kind;
  curve.rows.resize(taus.size());
  parallel_for(taus.size(), options.threads, [&](std::size_t k) {
    TradeoffRow& row = curve.rows[k];
    row.tau = taus[k];
    row.ballast_index = score::dataset_ballast_index(scores, row.tau);
    try {
      const Dataset pruned = score::prune(data, scores, row.tau);
      row.features_kept = pruned.n_features();
      row.metrics = train_eval(pruned, split, options.model);
    } catch (const EmptyResultError& e) {
      row.features_kept = 0;
      row.metrics.kind = curve.kind;
      row.skipped = e.what();
    }
  });
  return curve;
}

void write_tradeoff_csv(std::ostream& out, const TradeoffCurve& curve, bool with_timing) {
  write_csv_row(out, {"tau", "features_kept", "ballast_index", "auc", "f1", "accuracy", "recall",
                      "precision", "train_seconds", "mse", "r2", "skipped"});
  for (const auto& r : curve.rows) {
    const auto& m = r.metrics;
    const bool ran = !r.skipped.has_value();
    write_csv_row(out, {format_number(r.tau), std::to_string(r.features_kept),
                        format_number(r.ballast_index), cell(m.auc), cell(m.f1), cell(m.accuracy),
                        cell(m.recall), cell(m.precision),
                        with_timing && ran ? format_number(m.train_seconds) : std::string(),
                        cell(m.mse), cell(m.r2), r.skipped.value_or("")});
  }
}

StorageReport storage_report(const Dataset& data) {
  StorageReport r;
  r.n_rows = data.n_rows();
  for (const auto& col : data.columns()) {
    if (col.kind != ColumnKind::Numeric) {
      r.warnings.push_back("non-numeric column '" + col.name + "' left out of the byte model");
      continue;
    }
    ColumnStorage c;
    c.name = col.name;
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (!col.is_missing(i) && col.numeric[i] != 0.0) ++c.nnz;
    }
    c.sparsity = col.size() ? 1.0 - static_cast<double>(c.nnz) / static_cast<double>(col.size()) : 1.0;
    r.nnz += c.nnz;
    r.columns.push_back(std::move(c));
  }
  r.n_cols = r.columns.size();
  r.footprint = storage_bytes(r.n_rows, r.n_cols, r.nnz);
  if (r.footprint.savings_percent < 0.0) {
    r.warnings.push_back("CSR is larger than dense storage for this matrix (savings " +
                         format_number(r.footprint.savings_percent) + "%)");
  }
  return r;
}

StorageReport storage_report(const SparseMatrix& matrix) {
  StorageReport r;
  r.n_rows = matrix.n_rows;
  r.n_cols = matrix.n_cols;
  r.nnz = matrix.nnz();
  std::vector<std::size_t> per_col(matrix.n_cols, 0);
  for (auto c : matrix.col_indices) ++per_col[c];
  for (std::size_t j = 0; j < matrix.n_cols; ++j) {
    const double sp = matrix.n_rows ? 1.0 - static_cast<double>(per_col[j]) / static_cast<double>(matrix.n_rows) : 1.0;
    r.columns.push_back({"c" + std::to_string(j), per_col[j], sp});
  }
  r.footprint = storage_bytes(matrix);
  if (r.footprint.savings_percent < 0.0) {
    r.warnings.push_back("CSR is larger than dense storage for this matrix (savings " +
                         format_number(r.footprint.savings_percent) + "%)");
  }
  return r;
}

nlohmann::ordered_json storage_to_json(const StorageReport& report) {
  nlohmann::ordered_json j;
  j["n_rows"] = report.n_rows;
  j["n_cols"] = report.n_cols;
  j["nnz"] = report.nnz;
  const double cells = static_cast<double>(report.n_rows) * static_cast<double>(report.n_cols);
  j["density"] = cells > 0 ? static_cast<double>(report.nnz) / cells : 0.0;
  j["dense_bytes"] = report.footprint.dense_bytes;
  j["csr_bytes"] = report.footprint.csr_bytes;
  j["savings_percent"] = report.footprint.savings_percent;
  auto cols = nlohmann::ordered_json::array();
  for (const auto& c : report.columns) {
    cols.push_back({{"name", c.name}, {"nnz", c.nnz}, {"sparsity", c.sparsity}});
  }
  j["columns"] = std::move(cols);
  j["warnings"] = report.warnings;
  return j;
}

}  // namespace ballast::harness
