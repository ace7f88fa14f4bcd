#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "packsell/half.hpp"

namespace packsell {

/// Row and column indices. Column indices are stored in 32 bits by every
/// format, so matrices are limited to fewer than 2^31 columns.
using index_t = std::uint32_t;
/// Positions inside element arrays.
using offset_t = std::uint64_t;

struct CooEntry {
  index_t row;
  index_t col;
  double value;

  friend bool operator==(const CooEntry&, const CooEntry&) = default;
};

/// Coordinate-list matrix. Canonical form: entries sorted by (row, col) with
/// no repeated coordinate.
struct CooMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<CooEntry> entries;

  /// Sorts and sums duplicates. Explicit zeros stay as structural entries.
  void canonicalize();
  bool is_canonical() const;
};

/// Compressed sparse row matrix; immutable once constructed.
class CsrMatrix {
 public:
  CsrMatrix() : row_ptr_(1, 0) {}
  /// Throws FormatError unless row_ptr starts at 0, is non-decreasing, ends
  /// at nnz, and columns are strictly increasing and in range in every row.
  CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<offset_t> row_ptr,
            std::vector<index_t> col_idx, std::vector<double> values);

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return col_idx_.size(); }

  std::span<const offset_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const index_t> col_idx() const noexcept { return col_idx_; }
  std::span<const double> values() const noexcept { return values_; }

  std::size_t row_nnz(std::size_t i) const noexcept { return row_ptr_[i + 1] - row_ptr_[i]; }
  std::span<const index_t> row_cols(std::size_t i) const noexcept {
    return std::span(col_idx_).subspan(row_ptr_[i], row_nnz(i));
  }
  std::span<const double> row_values(std::size_t i) const noexcept {
    return std::span(values_).subspan(row_ptr_[i], row_nnz(i));
  }

  /// Same structure, new values (length must equal nnz).
  CsrMatrix with_values(std::vector<double> values) const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<offset_t> row_ptr_;
  std::vector<index_t> col_idx_;
  std::vector<double> values_;
};

struct MatrixStats {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::size_t nnz = 0;
  /// Population standard deviation of nonzeros per row over its mean.
  double rsd = 0.0;
  /// max over rows of (i - leftmost column), clamped at 0; empty rows ignored.
  std::size_t lower_bandwidth = 0;
  std::size_t upper_bandwidth = 0;
  double nnz_per_row_min = 0.0;
  double nnz_per_row_max = 0.0;
  double nnz_per_row_mean = 0.0;
};

/// Reads a `coordinate` Matrix Market stream with field `real` or `integer`
/// and symmetry `general` or `symmetric`. Symmetric input is expanded to
/// full storage, indices become 0-based, and duplicates are summed.
CooMatrix load_matrix_market(std::istream& in);
CooMatrix load_matrix_market_file(const std::string& path);

/// Writes `coordinate real general`, full storage, 17 significant digits.
void write_matrix_market(std::ostream& out, const CsrMatrix& a);
void write_matrix_market_file(const std::string& path, const CsrMatrix& a);

/// Canonicalises a copy if needed.
CsrMatrix to_csr(CooMatrix coo);
CooMatrix to_coo(const CsrMatrix& a);

/// y = A x with each row accumulated left to right in ascending column order
/// in the precision of X. Matrix values are rounded to X first.
template <class X>
void csr_spmv(const CsrMatrix& a, std::span<const X> x, std::span<X> y);

template <class X>
std::vector<X> csr_spmv(const CsrMatrix& a, std::span<const X> x) {
  std::vector<X> y(a.rows());
  csr_spmv<X>(a, x, y);
  return y;
}

/// Divides row i by sum_j |a_ij|. Throws ScalingError on a zero row sum.
CsrMatrix row_sum_scale(const CsrMatrix& a);

/// b_ij = a_ij / (g_i g_j), g_i = sqrt(|a_ii|). Throws ScalingError when a
/// diagonal entry is missing or zero.
CsrMatrix sym_diag_scale(const CsrMatrix& a);

MatrixStats compute_stats(const CsrMatrix& a);

/// Row-wise lower bandwidth (k_left).
std::size_t lower_bandwidth(const CsrMatrix& a);

/// Numeric symmetry: same pattern and a_ij == a_ji bitwise.
bool is_symmetric(const CsrMatrix& a);

/// ||A||_inf, the largest absolute row sum.
double norm_inf(const CsrMatrix& a);

/// Diagonal entries, 0 where not stored.
std::vector<double> diagonal(const CsrMatrix& a);

}  // namespace packsell
