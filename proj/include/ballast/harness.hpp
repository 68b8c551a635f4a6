#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ballast/core/dataset.hpp"
#include "ballast/core/sparse.hpp"

namespace ballast::harness {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Seeded shuffle; the first round(frac * n) shuffled rows train.
Split make_split(std::size_t n_rows, std::uint64_t seed, double train_frac = 0.8);

// Rank-based AUC with average ranks for ties. Labels are 0/1.
double compute_auc(std::span<const double> scores, std::span<const int> labels);

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

// Classification metrics are macro-averaged one-vs-rest for more than two
// classes. Fields that do not apply to the target kind hold NaN.
struct Metrics {
  TargetKind kind = TargetKind::Classification;
  double auc = kNotApplicable;
  double f1 = kNotApplicable;
  double accuracy = kNotApplicable;
  double recall = kNotApplicable;
  double precision = kNotApplicable;
  double mse = kNotApplicable;
  double r2 = kNotApplicable;
  double train_seconds = 0.0;
};

// Numeric columns as-is, categorical columns one-hot (up to
// kMaxOneHotLevels levels, otherwise skipped), text columns skipped. Missing
// cells are NaN until `prepare_design` fills them.
inline constexpr std::size_t kMaxOneHotLevels = 32;
struct Design {
  Eigen::MatrixXd x;
  std::vector<std::string> names;
};
Design encode_features(const Dataset& data);

// Fills NaN cells with the training mean and z-scores every column with
// training statistics. Constant columns become zero.
void prepare_design(Eigen::MatrixXd& x, std::span<const std::size_t> train_rows);

struct LogisticOptions {
  double lambda = 1e-3;
  std::size_t max_iterations = 500;
  double gradient_tolerance = 1e-5;
};

struct LogisticModel {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
};

// Gradient descent on mean log-loss + (lambda/2)||w||^2 with step 1/L.
// `y` holds 0/1 labels.
LogisticModel fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           const LogisticOptions& options = {});
Eigen::VectorXd predict_proba(const LogisticModel& model, const Eigen::MatrixXd& x);

// Requires a target. Throws DataError when either split half holds a single
// class.
Metrics train_eval(const Dataset& data, const Split& split, const LogisticOptions& options = {});
Metrics train_eval(const Dataset& data, std::uint64_t split_seed, double train_frac = 0.8);

struct TradeoffRow {
  double tau = 0.0;
  std::size_t features_kept = 0;
  double ballast_index = 0.0;
  Metrics metrics;
  std::optional<std::string> skipped;  // reason when the row was not evaluated
};

struct TradeoffCurve {
  TargetKind kind = TargetKind::Classification;
  std::vector<TradeoffRow> rows;  // ascending tau
};

struct SweepOptions {
  std::uint64_t seed = 42;
  double train_frac = 0.8;
  std::size_t threads = 1;
  LogisticOptions model;
};

// Prunes at every tau with the given per-feature scores and evaluates on one
// shared split. Taus that prune every feature yield skipped rows.
TradeoffCurve sweep(const Dataset& data, std::span<const double> scores, std::vector<double> taus,
                    const SweepOptions& options = {});

// Header `tau,features_kept,ballast_index,auc,f1,accuracy,recall,precision,train_seconds`,
// plus `mse,r2,skipped` columns. train_seconds is left empty unless
// `with_timing` is set, keeping reruns byte-identical.
void write_tradeoff_csv(std::ostream& out, const TradeoffCurve& curve, bool with_timing = false);

struct ColumnStorage {
  std::string name;
  std::size_t nnz = 0;
  double sparsity = 0.0;
};

struct StorageReport {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::size_t nnz = 0;
  StorageFootprint footprint;
  std::vector<ColumnStorage> columns;
  std::vector<std::string> warnings;
};

// Byte model over the numeric columns; missing cells are not stored.
StorageReport storage_report(const Dataset& data);
StorageReport storage_report(const SparseMatrix& matrix);
nlohmann::ordered_json storage_to_json(const StorageReport& report);

}  // namespace ballast::harness
