#include "ballast/core/sparse.hpp"

#include <algorithm>
#include <string>

#include "ballast/error.hpp"

namespace ballast {

namespace {
constexpr std::uint64_t kValueBytes = 8;
constexpr std::uint64_t kIndexBytes = 4;
}  // namespace

SparseMatrix SparseMatrix::from_dense(std::size_t n_rows, std::size_t n_cols,
                                      std::span<const double> dense) {
  if (dense.size() != n_rows * n_cols) throw DataError("dense buffer size does not match shape");
  SparseMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_offsets.reserve(n_rows + 1);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t j = 0; j < n_cols; ++j) {
      const double v = dense[i * n_cols + j];
      if (v != 0.0) {
        m.col_indices.push_back(static_cast<std::uint32_t>(j));
        m.values.push_back(v);
      }
    }
    m.row_offsets.push_back(static_cast<std::uint32_t>(m.values.size()));
  }
  return m;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> dense(n_rows * n_cols, 0.0);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (auto k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      dense[i * n_cols + col_indices[k]] = values[k];
    }
  }
  return dense;
}

std::span<const std::uint32_t> SparseMatrix::row_cols(std::size_t row) const {
  return std::span<const std::uint32_t>(col_indices)
      .subspan(row_offsets[row], row_offsets[row + 1] - row_offsets[row]);
}

std::span<const double> SparseMatrix::row_values(std::size_t row) const {
  return std::span<const double>(values).subspan(row_offsets[row],
                                                 row_offsets[row + 1] - row_offsets[row]);
}

void SparseMatrix::validate() const {
  if (row_offsets.size() != n_rows + 1) throw DataError("row_offsets length must be n_rows + 1");
  if (row_offsets.front() != 0) throw DataError("first row offset must be 0");
  if (row_offsets.back() != values.size()) throw DataError("last row offset must equal nnz");
  if (col_indices.size() != values.size()) throw DataError("col_indices and values differ in length");
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (row_offsets[i + 1] < row_offsets[i]) {
      throw DataError("row_offsets decrease at row " + std::to_string(i));
    }
    for (auto k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
      if (col_indices[k] >= n_cols) {
        throw DataError("column index out of range in row " + std::to_string(i));
      }
      if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1]) {
        throw DataError("column indices not strictly increasing in row " + std::to_string(i));
      }
    }
  }
}

SparseBuilder::SparseBuilder(std::size_t n_cols) { m_.n_cols = n_cols; }

void SparseBuilder::add_row(std::vector<std::pair<std::uint32_t, double>> entries) {
  std::sort(entries.begin(), entries.end());
  for (const auto& [col, value] : entries) {
    if (col >= m_.n_cols) throw DataError("column index out of range");
    if (value == 0.0) continue;
    if (!m_.col_indices.empty() && m_.values.size() > m_.row_offsets.back() &&
        m_.col_indices.back() == col) {
      m_.values.back() += value;
      continue;
    }
    m_.col_indices.push_back(col);
    m_.values.push_back(value);
  }
  m_.row_offsets.push_back(static_cast<std::uint32_t>(m_.values.size()));
  ++m_.n_rows;
}

SparseMatrix SparseBuilder::finish() && { return std::move(m_); }

StorageFootprint storage_bytes(std::size_t n_rows, std::size_t n_cols, std::size_t nnz) {
  StorageFootprint f;
  f.dense_bytes = static_cast<std::uint64_t>(n_rows) * n_cols * kValueBytes;
  f.csr_bytes = static_cast<std::uint64_t>(nnz) * (kValueBytes + kIndexBytes) +
                (static_cast<std::uint64_t>(n_rows) + 1) * kIndexBytes;
  f.savings_percent =
      f.dense_bytes == 0
          ? 0.0
          : 100.0 * (1.0 - static_cast<double>(f.csr_bytes) / static_cast<double>(f.dense_bytes));
  return f;
}

StorageFootprint storage_bytes(const SparseMatrix& matrix) {
  return storage_bytes(matrix.n_rows, matrix.n_cols, matrix.nnz());
}

StorageFootprint storage_bytes(std::size_t n_rows, std::size_t n_cols,
                               std::span<const double> dense) {
  const auto nnz = static_cast<std::size_t>(
      std::count_if(dense.begin(), dense.end(), [](double v) { return v != 0.0; }));
  return storage_bytes(n_rows, n_cols, nnz);
}

}  // namespace ballast
