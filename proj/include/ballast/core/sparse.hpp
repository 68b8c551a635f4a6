#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ballast {

// Compressed sparse row matrix. Explicit zeros are never stored.
struct SparseMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::uint32_t> row_offsets{0};
  std::vector<std::uint32_t> col_indices;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return values.size(); }

  // `dense` is row-major, n_rows * n_cols.
  static SparseMatrix from_dense(std::size_t n_rows, std::size_t n_cols,
                                 std::span<const double> dense);
  std::vector<double> to_dense() const;

  std::span<const std::uint32_t> row_cols(std::size_t row) const;
  std::span<const double> row_values(std::size_t row) const;

  // Checks every structural invariant; throws DataError describing the first
  // violation found.
  void validate() const;
};

// Builds rows incrementally; columns within a row may arrive in any order.
class SparseBuilder {
 public:
  explicit SparseBuilder(std::size_t n_cols);
  void add_row(std::vector<std::pair<std::uint32_t, double>> entries);
  SparseMatrix finish() &&;

 private:
  SparseMatrix m_;
};

// Fixed byte model: 8-byte values, 4-byte column indices and row offsets.
struct StorageFootprint {
  std::uint64_t dense_bytes = 0;
  std::uint64_t csr_bytes = 0;
  double savings_percent = 0.0;
};

StorageFootprint storage_bytes(std::size_t n_rows, std::size_t n_cols, std::size_t nnz);
StorageFootprint storage_bytes(const SparseMatrix& matrix);
StorageFootprint storage_bytes(std::size_t n_rows, std::size_t n_cols,
                               std::span<const double> dense);

}  // namespace ballast
