#include "packsell/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "packsell/errors.hpp"
#include "packsell/parallel.hpp"

namespace packsell {

void CooMatrix::canonicalize() {
  std::stable_sort(entries.begin(), entries.end(), [](const CooEntry& a, const CooEntry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<CooEntry> merged;
  merged.reserve(entries.size());
  for (const auto& e : entries) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col) {
      merged.back().value += e.value;
    } else {
      merged.push_back(e);
    }
  }
  entries = std::move(merged);
}

bool CooMatrix::is_canonical() const {
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (entries[k].row >= n_rows || entries[k].col >= n_cols) return false;
    if (k > 0) {
      const auto& p = entries[k - 1];
      const auto& e = entries[k];
      if (p.row > e.row || (p.row == e.row && p.col >= e.col)) return false;
    }
  }
  return true;
}

CsrMatrix::CsrMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<offset_t> row_ptr,
                     std::vector<index_t> col_idx, std::vector<double> values)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (n_cols_ >= (std::size_t{1} << 31) || n_rows_ >= (std::size_t{1} << 31)) {
    throw FormatError("matrix dimensions must be below 2^31");
  }
  if (row_ptr_.size() != n_rows_ + 1) throw FormatError("row_ptr length must be n_rows + 1");
  if (col_idx_.size() != values_.size()) throw FormatError("col_idx and values differ in length");
  if (row_ptr_.front() != 0 || row_ptr_.back() != col_idx_.size()) {
    throw FormatError("row_ptr must start at 0 and end at nnz");
  }
  for (std::size_t i = 0; i < n_rows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw FormatError("row_ptr is decreasing");
    for (offset_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= n_cols_) throw FormatError("column index out of range");
      if (k > row_ptr_[i] && col_idx_[k - 1] >= col_idx_[k]) {
        throw FormatError("columns must be strictly increasing within a row");
      }
    }
  }
}

CsrMatrix CsrMatrix::with_values(std::vector<double> values) const {
  if (values.size() != nnz()) throw DimensionError("value count does not match nnz");
  return CsrMatrix(n_rows_, n_cols_, row_ptr_, col_idx_, std::move(values));
}

CsrMatrix to_csr(CooMatrix coo) {
  if (!coo.is_canonical()) coo.canonicalize();
  for (const auto& e : coo.entries) {
    if (e.row >= coo.n_rows || e.col >= coo.n_cols) throw FormatError("COO entry out of bounds");
  }
  std::vector<offset_t> row_ptr(coo.n_rows + 1, 0);
  std::vector<index_t> cols;
  std::vector<double> vals;
  cols.reserve(coo.entries.size());
  vals.reserve(coo.entries.size());
  for (const auto& e : coo.entries) {
    ++row_ptr[e.row + 1];
    cols.push_back(e.col);
    vals.push_back(e.value);
  }
  for (std::size_t i = 0; i < coo.n_rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(coo.n_rows, coo.n_cols, std::move(row_ptr), std::move(cols), std::move(vals));
}

CooMatrix to_coo(const CsrMatrix& a) {
  CooMatrix coo{a.rows(), a.cols(), {}};
  coo.entries.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      coo.entries.push_back({static_cast<index_t>(i), cols[k], vals[k]});
    }
  }
  return coo;
}

template <class X>
void csr_spmv(const CsrMatrix& a, std::span<const X> x, std::span<X> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) {
    throw DimensionError("csr_spmv: vector length does not match matrix shape");
  }
  const auto row_ptr = a.row_ptr();
  const auto col = a.col_idx();
  const auto val = a.values();
  const auto n = static_cast<std::int64_t>(a.rows());

#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    X t{};
    for (offset_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      t = t + static_cast<X>(val[k]) * x[col[k]];
    }
    y[i] = t;
  }
}

template void csr_spmv<double>(const CsrMatrix&, std::span<const double>, std::span<double>);
template void csr_spmv<float>(const CsrMatrix&, std::span<const float>, std::span<float>);
template void csr_spmv<Half>(const CsrMatrix&, std::span<const Half>, std::span<Half>);

CsrMatrix row_sum_scale(const CsrMatrix& a) {
  std::vector<double> vals(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double g = 0.0;
    for (double v : a.row_values(i)) g += std::fabs(v);
    if (g == 0.0) throw ScalingError("row_sum_scale: zero row sum", i);
    for (offset_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) vals[k] /= g;
  }
  return a.with_values(std::move(vals));
}

std::vector<double> diagonal(const CsrMatrix& a) {
  std::vector<double> d(std::min(a.rows(), a.cols()), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto cols = a.row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<index_t>(i));
    if (it != cols.end() && *it == i) d[i] = a.row_values(i)[it - cols.begin()];
  }
  return d;
}

CsrMatrix sym_diag_scale(const CsrMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("sym_diag_scale requires a square matrix");
  std::vector<double> g(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<index_t>(i));
    if (it == cols.end() || *it != i) throw ScalingError("sym_diag_scale: missing diagonal", i);
    const double d = a.row_values(i)[it - cols.begin()];
    if (d == 0.0) throw ScalingError("sym_diag_scale: zero diagonal", i);
    g[i] = std::sqrt(std::fabs(d));
  }
  std::vector<double> vals(a.values().begin(), a.values().end());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (offset_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k) {
      // (a / g_i) / g_j would not be symmetric in i and j; a / (g_i g_j) is.
      vals[k] = vals[k] / (g[i] * g[a.col_idx()[k]]);
    }
  }
  return a.with_values(std::move(vals));
}

std::size_t lower_bandwidth(const CsrMatrix& a) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (a.row_nnz(i) == 0) continue;
    const std::size_t leftmost = a.row_cols(i).front();
    if (leftmost < i) k = std::max(k, i - leftmost);
  }
  return k;
}

MatrixStats compute_stats(const CsrMatrix& a) {
  MatrixStats s;
  s.n_rows = a.rows();
  s.n_cols = a.cols();
  s.nnz = a.nnz();
  s.lower_bandwidth = lower_bandwidth(a);
  if (a.rows() == 0) return s;

  std::size_t lo = a.row_nnz(0), hi = a.row_nnz(0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const std::size_t count = a.row_nnz(i);
    lo = std::min(lo, count);
    hi = std::max(hi, count);
    if (count > 0) {
      const std::size_t rightmost = a.row_cols(i).back();
      if (rightmost > i) s.upper_bandwidth = std::max(s.upper_bandwidth, rightmost - i);
    }
  }
  const double mean = static_cast<double>(a.nnz()) / static_cast<double>(a.rows());
  double sq = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double dev = static_cast<double>(a.row_nnz(i)) - mean;
    sq += dev * dev;
  }
  s.nnz_per_row_min = static_cast<double>(lo);
  s.nnz_per_row_max = static_cast<double>(hi);
  s.nnz_per_row_mean = mean;
  s.rsd = (mean == 0.0 || lo == hi) ? 0.0 : std::sqrt(sq / static_cast<double>(a.rows())) / mean;
  return s;
}

bool is_symmetric(const CsrMatrix& a) {
  if (a.rows() != a.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto other = a.row_cols(cols[k]);
      const auto it = std::lower_bound(other.begin(), other.end(), static_cast<index_t>(i));
      if (it == other.end() || *it != i) return false;
      if (a.row_values(cols[k])[it - other.begin()] != vals[k]) return false;
    }
  }
  return true;
}

double norm_inf(const CsrMatrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double v : a.row_values(i)) s += std::fabs(v);
    best = std::max(best, s);
  }
  return best;
}

}  // namespace packsell
