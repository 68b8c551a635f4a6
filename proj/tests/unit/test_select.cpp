#include <doctest.h>

#include <cmath>

#include "ballast/error.hpp"
#include "ballast/select.hpp"
#include "test_support.hpp"

using namespace ballast;
using namespace ballast::select;

namespace {

using Strings = std::vector<std::string>;

Eigen::MatrixXd random_design(testing::Gen& g, Eigen::Index n, Eigen::Index p) {
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = g.normal() * (1.0 + static_cast<double>(j)) + static_cast<double>(j);
  return x;
}

Eigen::VectorXd sparse_response(testing::Gen& g, const Eigen::MatrixXd& x) {
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) y(i) = 2.0 * x(i, 0) - 1.5 * x(i, 1) + 0.5 * g.normal() + 3.0;
  return y;
}

double soft(double z, double t) { return z > t ? z - t : (z < -t ? z + t : 0.0); }

SignalTable mi_table(const std::vector<std::pair<std::string, double>>& rows) {
  SignalTable t;
  for (const auto& [f, v] : rows) t.add(f, "mi", SignalKind::Utility, v);
  return t;
}

}  // namespace

TEST_SUITE("matrix helpers") {
  TEST_CASE("numeric matrix fills missing cells with the column mean") {
    std::vector<FeatureColumn> cols;
    cols.push_back(FeatureColumn::make_numeric("a", {1, 0, 3}, {0, 1, 0}));
    cols.push_back(FeatureColumn::make_categorical("c", {"x", "y", "z"}));
    cols.push_back(FeatureColumn::make_numeric("b", {4, 5, 6}));
    const Dataset data(std::move(cols), 3);
    std::vector<std::size_t> idx;
    const auto m = numeric_matrix(data, &idx);
    CHECK(idx == std::vector<std::size_t>{0, 2});
    CHECK(m(1, 0) == 2.0);
    CHECK(m(2, 1) == 6.0);
  }

  TEST_CASE("standardize") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 7, 2, 7, 3, 7, 4, 7;
    const auto s = standardize(x);
    CHECK(s.mean(0) == 2.5);
    CHECK(s.scale(0) == doctest::Approx(std::sqrt(1.25)));
    CHECK(s.scale(1) == 0.0);
    CHECK(s.x.col(1).isZero());
    CHECK(s.x.col(0).squaredNorm() / 4.0 == doctest::Approx(1.0));
  }

  TEST_CASE("variance filter is strict") {
    std::vector<FeatureColumn> cols;
    cols.push_back(FeatureColumn::make_numeric("const", {2, 2, 2, 2}));
    cols.push_back(FeatureColumn::make_numeric("small", {0, 0, 0, 1}));
    cols.push_back(FeatureColumn::make_numeric("big", {0, 10, 0, 10}));
    cols.push_back(FeatureColumn::make_numeric("gone", {0, 0, 0, 0}, {1, 1, 1, 1}));
    const Dataset data(std::move(cols), 4);
    auto s = variance_filter(data, 0.0);
    CHECK(s.kept == Strings{"small", "big"});
    CHECK(s.dropped == Strings{"const", "gone"});
    s = variance_filter(data, 0.1875);  // exactly var(small)
    CHECK(s.kept == Strings{"big"});
  }
}

TEST_SUITE("lasso") {
  TEST_CASE("orthonormal design gives soft-thresholded least squares") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 1, 1, -1, -1, 1, -1, -1;
    Eigen::VectorXd y(4);
    y << 3, 1, 0, -2;
    // centered y = (2.5, .5, -.5, -2.5); x_j'y/n = 1.5 and 1.0
    CHECK(lasso_lambda_max(x, y) == doctest::Approx(1.5));
    for (double lambda : {0.0, 0.3, 1.2, 1.5, 2.0}) {
      const auto fit = lasso_fit(x, y, lambda);
      CHECK(fit.converged);
      CHECK(fit.coefficients(0) == doctest::Approx(soft(1.5, lambda)).epsilon(1e-12));
      CHECK(fit.coefficients(1) == doctest::Approx(soft(1.0, lambda)).epsilon(1e-12));
    }
  }

  TEST_CASE("lambda max zeroes every coefficient") {
    testing::Gen g(1);
    for (int trial = 0; trial < 20; ++trial) {
      const auto x = random_design(g, 40, 5);
      const auto y = sparse_response(g, x);
      const double lmax = lasso_lambda_max(x, y);
      CHECK(lasso_fit(x, y, lmax).coefficients.isZero());
      CHECK(lasso_select(x, y, lmax * 1.01).empty());
      CHECK_FALSE(lasso_select(x, y, lmax * 0.9).empty());
    }
  }

  TEST_CASE("KKT conditions hold at the solution") {
    testing::Gen g(2);
    LassoOptions tight;
    tight.tolerance = 1e-12;
    tight.max_sweeps = 20000;
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = g.integer(2, 8);
      const auto x = random_design(g, 60, p);
      const auto y = sparse_response(g, x);
      const double lambda = g.uniform(0.01, 0.9) * lasso_lambda_max(x, y);
      const auto fit = lasso_fit(x, y, lambda, tight);
      REQUIRE(fit.converged);
      const auto s = standardize(x);
      const Eigen::VectorXd yc = y.array() - y.mean();
      const Eigen::VectorXd r = yc - s.x * fit.coefficients;
      const double n = static_cast<double>(x.rows());
      for (Eigen::Index j = 0; j < p; ++j) {
        const double grad = s.x.col(j).dot(r) / n;
        const double b = fit.coefficients(j);
        if (b != 0.0)
          REQUIRE(grad == doctest::Approx(lambda * (b > 0 ? 1.0 : -1.0)).epsilon(1e-6));
        else
          REQUIRE(std::abs(grad) <= lambda + 1e-8);
      }
    }
  }

  TEST_CASE("objective is nonincreasing in the number of sweeps") {
    testing::Gen g(3);
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = random_design(g, 50, 6);
      const auto y = sparse_response(g, x);
      const double lambda = 0.05 * lasso_lambda_max(x, y);
      double previous = lasso_objective(x, y, Eigen::VectorXd::Zero(6), lambda);
      for (std::size_t sweeps = 1; sweeps <= 15; ++sweeps) {
        LassoOptions o;
        o.max_sweeps = sweeps;
        const double obj = lasso_objective(x, y, lasso_fit(x, y, lambda, o).coefficients, lambda);
        REQUIRE(obj <= previous + 1e-12);
        previous = obj;
      }
    }
  }

  TEST_CASE("original-unit coefficients reproduce standardized predictions") {
    testing::Gen g(4);
    const auto x = random_design(g, 30, 3);
    const auto y = sparse_response(g, x);
    const auto fit = lasso_fit(x, y, 0.1);
    const auto s = standardize(x);
    const Eigen::VectorXd a = (s.x * fit.coefficients).array() + y.mean();
    const Eigen::VectorXd b = (x * fit.original_coefficients).array() + fit.intercept;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("path starts empty and grows") {
    testing::Gen g(5);
    const auto x = random_design(g, 50, 4);
    const auto y = sparse_response(g, x);
    const auto path = lasso_path(x, y, 10);
    REQUIRE(path.size() == 10);
    CHECK(path.front().coefficients.isZero());
    CHECK(path.back().lambda == doctest::Approx(1e-4 * path.front().lambda));
    CHECK((path.back().coefficients.array() != 0.0).count() == 4);
    CHECK_THROWS_AS(lasso_path(x, y, 1), ConfigError);
  }

  TEST_CASE("bad inputs") {
    Eigen::MatrixXd x(3, 1);
    x << 1, 2, 3;
    Eigen::VectorXd y(3);
    y << 1, 2, 3;
    CHECK_THROWS_AS(lasso_fit(x, y, -1.0), ConfigError);
    y(1) = std::nan("");
    CHECK_THROWS_AS(lasso_fit(x, y, 0.1), DataError);
  }
}

TEST_SUITE("pca") {
  TEST_CASE("collinear data has one component") {
    Eigen::MatrixXd x(5, 2);
    x << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10;
    const auto fit = pca_fit(x);
    CHECK(fit.explained_ratio(0) == doctest::Approx(1.0));
    CHECK(pca_select(fit, 0.95) == 1);
    CHECK(fit.components(0, 0) == doctest::Approx(1.0 / std::sqrt(5.0)));
    CHECK(fit.components(0, 1) == doctest::Approx(2.0 / std::sqrt(5.0)));
    CHECK(fit.explained_variance(0) == doctest::Approx(2.5 * 5.0));
    const auto t = pca_transform(fit, x, 1);
    CHECK(t.rows() == 5);
    CHECK(t.cols() == 1);
    CHECK(t(2, 0) == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("components are orthonormal and ratios ordered") {
    testing::Gen g(6);
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = g.integer(2, 6);
      const auto x = random_design(g, 40, p);
      const auto fit = pca_fit(x);
      const Eigen::MatrixXd gram = fit.components * fit.components.transpose();
      REQUIRE((gram - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() < 1e-9);
      REQUIRE(fit.explained_ratio.sum() == doctest::Approx(1.0));
      for (Eigen::Index k = 1; k < p; ++k) REQUIRE(fit.explained_ratio(k) <= fit.explained_ratio(k - 1) + 1e-15);
      const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
      const double total = centered.squaredNorm() / static_cast<double>(x.rows() - 1);
      REQUIRE(fit.explained_variance.sum() == doctest::Approx(total));
      REQUIRE(pca_select(fit, 1.0) <= static_cast<std::size_t>(p));
    }
  }

  TEST_CASE("degenerate input") {
    Eigen::MatrixXd one(1, 2);
    one << 1, 2;
    CHECK_THROWS_AS(pca_fit(one), DataError);
    CHECK_THROWS_AS(pca_fit(Eigen::MatrixXd::Ones(4, 2)), DataError);
  }
}

TEST_SUITE("kmeans") {
  TEST_CASE("separated blobs") {
    testing::Gen g(7);
    Eigen::MatrixXd x(40, 2);
    for (int i = 0; i < 40; ++i) {
      const double c = i < 20 ? -10.0 : 10.0;
      x(i, 0) = c + g.normal();
      x(i, 1) = c + g.normal();
    }
    const auto r = kmeans(x, 2, 42);
    CHECK(r.converged);
    for (int i = 1; i < 20; ++i) CHECK(r.assignments[static_cast<std::size_t>(i)] == r.assignments[0]);
    for (int i = 21; i < 40; ++i) CHECK(r.assignments[static_cast<std::size_t>(i)] == r.assignments[20]);
    CHECK(r.assignments[0] != r.assignments[20]);
    const auto again = kmeans(x, 2, 42);
    CHECK(again.assignments == r.assignments);
    CHECK(again.inertia == r.inertia);
  }

  TEST_CASE("inertia never increases across Lloyd steps") {
    testing::Gen g(8);
    for (int trial = 0; trial < 30; ++trial) {
      const auto n = g.integer(5, 60);
      const auto k = static_cast<std::size_t>(g.integer(1, std::min<long>(n, 6)));
      const auto x = random_design(g, n, 3);
      const auto r = kmeans(x, k, static_cast<std::uint64_t>(trial));
      REQUIRE_FALSE(r.inertia_history.empty());
      for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
        REQUIRE(r.inertia_history[i] <= r.inertia_history[i - 1] * (1 + 1e-12) + 1e-12);
      REQUIRE(r.inertia == doctest::Approx(r.inertia_history.back()));
    }
  }

  TEST_CASE("invalid k") {
    const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
    CHECK_THROWS_AS(kmeans(x, 0, 1), ConfigError);
    CHECK_THROWS_AS(kmeans(x, 4, 1), ConfigError);
  }
}

TEST_SUITE("signal selectors") {
  TEST_CASE("mi retention") {
    const auto t = mi_table({{"a", 0.2}, {"b", 0.5}, {"c", 0.2}, {"d", 0.0}});
    RetentionRule top;
    top.top_k = 2;
    auto s = mi_retention_select(t, top);
    CHECK(s.kept == Strings{"a", "b"});  // feature order, c loses the tie to a
    CHECK(s.dropped == Strings{"c", "d"});
    RetentionRule floor;
    floor.min_mi = 0.2;
    s = mi_retention_select(t, floor);
    CHECK(s.kept.size() == 3);
    floor.min_mi = 0.9;
    s = mi_retention_select(t, floor);
    CHECK(s.kept.empty());
    CHECK_FALSE(s.warnings.empty());
    RetentionRule both = top;
    both.min_mi = 0.1;
    CHECK_THROWS_AS(mi_retention_select(t, both), ConfigError);
    CHECK_THROWS_AS(mi_retention_select(t, RetentionRule{}), ConfigError);
  }

  TEST_CASE("external importance") {
    SignalTable t;
    t.add("a", "shap", SignalKind::Utility, 0.3);
    t.add("b", "shap", SignalKind::Utility, 0.01);
    const auto s = external_importance_select(t, "shap", 0.3);
    CHECK(s.kept == Strings{"a"});
    CHECK(s.dropped == Strings{"b"});
    CHECK_THROWS_AS(external_importance_select(t, "missing", 0.1), DataError);
  }
}
