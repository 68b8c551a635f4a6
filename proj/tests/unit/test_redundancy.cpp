#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ballast/error.hpp"
#include "ballast/redundancy.hpp"
#include "test_support.hpp"

using namespace ballast;
using namespace ballast::redundancy;

namespace {

Dataset numeric_dataset(const std::vector<std::pair<std::string, std::vector<double>>>& cols) {
  std::vector<FeatureColumn> out;
  for (const auto& [name, v] : cols) out.push_back(FeatureColumn::make_numeric(name, v));
  return Dataset(std::move(out), cols.front().second.size());
}

}  // namespace

TEST_CASE("average ranks share ties") {
  const std::vector<double> v{10, 20, 20, 5};
  const auto r = average_ranks(v);
  CHECK(r == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("pearson and spearman on small samples") {
  bool ok = false;
  const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8}, z{4, 3, 2, 1};
  CHECK(pearson(x, y, ok) == doctest::Approx(1.0));
  CHECK(ok);
  CHECK(pearson(x, z, ok) == doctest::Approx(-1.0));
  const std::vector<double> c{3, 3, 3, 3};
  CHECK(pearson(x, c, ok) == 0.0);
  CHECK_FALSE(ok);
  const std::vector<double> one{1};
  CHECK(spearman(one, one, ok) == 0.0);
  CHECK_FALSE(ok);
}

TEST_CASE("spearman is invariant to monotone transforms") {
  testing::Gen g(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(g.integer(3, 60));
    const auto x = g.normals(n);
    auto y = g.normals(n);
    for (std::size_t i = 0; i < n; ++i) y[i] += 0.5 * x[i];
    std::vector<double> fx(n), fy(n);
    for (std::size_t i = 0; i < n; ++i) {
      fx[i] = std::exp(x[i]);
      fy[i] = y[i] * y[i] * y[i] + 2.0;
    }
    bool ok1 = false, ok2 = false;
    REQUIRE(spearman(x, y, ok1) == doctest::Approx(spearman(fx, fy, ok2)).epsilon(1e-12));
    REQUIRE(ok1 == ok2);
  }
}

TEST_CASE("correlation matrix is symmetric with unit diagonal") {
  testing::Gen g(5);
  std::vector<std::pair<std::string, std::vector<double>>> cols;
  for (int j = 0; j < 5; ++j) cols.push_back({"f" + std::to_string(j), g.normals(40)});
  const auto data = numeric_dataset(cols);
  for (auto method : {CorrelationMethod::Pearson, CorrelationMethod::Spearman}) {
    const auto m = correlation_matrix(data, method, 3);
    REQUIRE(m.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(m.at(i, i) == doctest::Approx(1.0));
      for (std::size_t j = 0; j < 5; ++j) {
        CHECK(m.at(i, j) == m.at(j, i));
        CHECK(std::abs(m.at(i, j)) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("non-numeric columns are skipped") {
  std::vector<FeatureColumn> cols;
  cols.push_back(FeatureColumn::make_numeric("a", {1, 2, 3}));
  cols.push_back(FeatureColumn::make_categorical("c", {"x", "y", "x"}));
  cols.push_back(FeatureColumn::make_numeric("b", {3, 1, 2}));
  const Dataset data(std::move(cols), 3);
  const auto m = correlation_matrix(data, CorrelationMethod::Pearson);
  REQUIRE(m.size() == 2);
  CHECK(m.column_index == std::vector<std::size_t>{0, 2});
}

TEST_CASE("three exact duplicates: filter drops two") {
  testing::Gen g(8);
  const auto base = g.normals(50);
  const auto other = g.normals(50);
  const auto data = numeric_dataset({{"a", base}, {"b", base}, {"c", base}, {"d", other}});
  const auto m = correlation_matrix(data, CorrelationMethod::Pearson);
  const auto r = correlation_filter(m, 0.95);
  CHECK(r.dropped.size() == 2);
  CHECK(r.kept.size() == 2);
  CHECK(std::find(r.kept.begin(), r.kept.end(), 3u) != r.kept.end());
  // equal mean |r|: the later duplicates go
  CHECK(r.dropped == std::vector<std::size_t>{1, 2});
}

TEST_CASE("filter keeps every feature when the threshold is not exceeded") {
  const auto data = numeric_dataset({{"a", {1, 2, 3, 4}}, {"b", {2, 4, 6, 8}}});
  const auto m = correlation_matrix(data, CorrelationMethod::Pearson);
  CHECK(correlation_filter(m, 1.0).dropped.empty());
  CHECK(correlation_filter(m, 0.99).dropped.size() == 1);
}

TEST_CASE("filtered survivors never exceed the threshold pairwise") {
  testing::Gen g(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto p = static_cast<int>(g.integer(2, 8));
    std::vector<std::pair<std::string, std::vector<double>>> cols;
    const auto base = g.normals(30);
    for (int j = 0; j < p; ++j) {
      auto v = g.normals(30);
      const double mix = g.uniform(0, 1);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = mix * base[i] + (1 - mix) * 0.3 * v[i];
      cols.push_back({"f" + std::to_string(j), v});
    }
    const auto m = correlation_matrix(numeric_dataset(cols), CorrelationMethod::Pearson);
    const double t = g.uniform(0.3, 0.99);
    const auto r = correlation_filter(m, t);
    REQUIRE(r.kept.size() + r.dropped.size() == m.size());
    REQUIRE_FALSE(r.kept.empty());
    for (auto i : r.kept)
      for (auto j : r.kept)
        if (i != j && m.is_valid(i, j)) REQUIRE(std::abs(m.at(i, j)) <= t);
  }
}

TEST_CASE("cosine similarity") {
  const std::vector<double> a{1, 0}, b{0, 1}, c{2, 0}, z{0, 0};
  CHECK(cosine_similarity(a, b) == 0.0);
  CHECK(cosine_similarity(a, c) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cosine_similarity(a, z), DataError);
}

TEST_CASE("IoU") {
  const std::set<std::string> a{"x", "y"}, b{"y", "z"}, e;
  CHECK(iou(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(e, e) == 0.0);
  const std::vector<std::string> va{"x", "y", "y"}, vb{"y", "z"};
  CHECK(iou(va, vb) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("Jensen-Shannon divergence") {
  const std::vector<double> p{1, 0}, q{0.5, 0.5}, r{0, 1};
  CHECK(js_divergence(p, q) == doctest::Approx(0.3112781244591328).epsilon(1e-12));
  CHECK(js_divergence(p, p) == 0.0);
  CHECK(js_divergence(p, r) == doctest::Approx(1.0));
  const std::vector<double> bad{0.5, 0.2};
  CHECK_THROWS_AS(js_divergence(p, bad), DataError);
}

TEST_CASE("JS divergence is symmetric and bounded") {
  testing::Gen g(33);
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = static_cast<std::size_t>(g.integer(2, 12));
    const auto p = g.simplex(k, 0.3), q = g.simplex(k, 0.3);
    const double d = js_divergence(p, q);
    REQUIRE(d >= 0.0);
    REQUIRE(d <= 1.0 + 1e-12);
    REQUIRE(d == doctest::Approx(js_divergence(q, p)).epsilon(1e-12));
  }
}
