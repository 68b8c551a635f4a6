#pragma once

// Small helpers shared by the unit tests: a seeded generator for property
// checks and a scratch directory that cleans up after itself.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "ballast/random.hpp"

namespace testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * ballast::unit_uniform(rng_);
  }
  double normal(double mean = 0.0, double sd = 1.0) { return mean + sd * ballast::standard_normal(rng_); }
  // Inclusive range.
  long integer(long lo, long hi) {
    return lo + static_cast<long>(ballast::uniform_index(rng_, static_cast<std::size_t>(hi - lo + 1)));
  }
  bool coin(double p = 0.5) { return uniform() < p; }

  std::vector<double> normals(std::size_t n, double sd = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal(0.0, sd);
    return v;
  }
  // A probability vector of length k with some exact zeros.
  std::vector<double> simplex(std::size_t k, double zero_rate = 0.2) {
    std::vector<double> p(k);
    double total = 0.0;
    for (auto& x : p) {
      x = coin(zero_rate) ? 0.0 : uniform(0.01, 1.0);
      total += x;
    }
    if (total == 0.0) {
      p[0] = 1.0;
      return p;
    }
    for (auto& x : p) x /= total;
    return p;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ballast_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path write(const std::string& name, const std::string& contents) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << contents;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testing
