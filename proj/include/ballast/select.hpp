#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ballast/core/dataset.hpp"
#include "ballast/core/signals.hpp"

namespace ballast::select {

struct Selection {
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  std::vector<std::string> warnings;
};

// Keeps features whose variance is strictly above `threshold`. Uses
// stats::variance, so categorical columns are judged by their one-hot
// variance; all-missing columns are always dropped.
Selection variance_filter(const Dataset& data, double threshold);

// Numeric columns as an n x k matrix with missing cells replaced by the
// column mean. `columns` receives the dataset index of every matrix column.
Eigen::MatrixXd numeric_matrix(const Dataset& data, std::vector<std::size_t>* columns = nullptr);

// Column-wise z-scoring with population standard deviation. Constant columns
// get scale 0 and are left at zero.
struct Standardized {
  Eigen::MatrixXd x;
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;
};
Standardized standardize(const Eigen::MatrixXd& x);

// ---------------------------------------------------------------------------
// Lasso

struct LassoOptions {
  std::size_t max_sweeps = 1000;
  double tolerance = 1e-6;  // on the largest coefficient change in a sweep
};

struct LassoFit {
  Eigen::VectorXd coefficients;           // on the standardized design
  Eigen::VectorXd original_coefficients;  // mapped back to input units
  double intercept = 0.0;                 // in input units
  double lambda = 0.0;
  std::size_t iterations_used = 0;
  bool converged = false;
};

// Smallest lambda at which every coefficient is zero: max_j |x_j' y| / n on
// the standardized design and centered response.
double lasso_lambda_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Cyclic coordinate descent on (1/2n)||y - Xb||^2 + lambda ||b||_1 with X
// standardized and y centered internally.
LassoFit lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda,
                   const LassoOptions& options = {});

// Objective value of standardized-scale coefficients `beta` on (x, y); x and y
// are standardized/centered the same way lasso_fit does.
double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda);

// Column indices with a nonzero coefficient.
std::vector<std::size_t> lasso_select(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      double lambda, const LassoOptions& options = {});

// Warm-started fits on a log-spaced grid from lambda_max down to
// 1e-4 * lambda_max.
std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                 std::size_t n_lambdas = 50, const LassoOptions& options = {});

// ---------------------------------------------------------------------------
// PCA

struct PcaFit {
  Eigen::MatrixXd components;  // rows are orthonormal loadings, largest |entry| positive
  Eigen::VectorXd explained_variance;
  Eigen::VectorXd explained_ratio;  // nonincreasing
  Eigen::VectorXd mean;
};

PcaFit pca_fit(const Eigen::MatrixXd& x);
// Smallest k whose cumulative explained ratio reaches `variance_frac`.
std::size_t pca_select(const PcaFit& fit, double variance_frac);
Eigen::MatrixXd pca_transform(const PcaFit& fit, const Eigen::MatrixXd& x, std::size_t k);

// ---------------------------------------------------------------------------
// k-means

struct KMeansOptions {
  std::size_t max_iterations = 300;
  double tolerance = 1e-6;  // on the largest centroid shift
};

struct KMeansResult {
  std::vector<std::size_t> assignments;
  Eigen::MatrixXd centroids;  // k x m
  double inertia = 0.0;
  std::vector<double> inertia_history;  // one entry per assignment step
  std::size_t iterations = 0;
  bool converged = false;
};

// k-means++ seeding followed by Lloyd iterations.
KMeansResult kmeans(const Eigen::MatrixXd& x, std::size_t k, std::uint64_t seed,
                    const KMeansOptions& options = {});

// ---------------------------------------------------------------------------
// Signal-driven selectors

struct RetentionRule {
  std::optional<std::size_t> top_k;
  std::optional<double> min_mi;
};

// Top-k by the "mi" signal, or every feature with MI >= min_mi. Equal MI
// values keep signal-table feature order.
Selection mi_retention_select(const SignalTable& signals, const RetentionRule& rule,
                              std::string_view mi_signal = "mi");

// Keeps features whose named signal is >= threshold (e.g. mean |SHAP|).
Selection external_importance_select(const SignalTable& signals, std::string_view signal,
                                     double threshold);

}  // namespace ballast::select
