#include "packsell/sell.hpp"

#include <algorithm>
#include <numeric>

#include "packsell/errors.hpp"
#include "packsell/parallel.hpp"

namespace packsell {

std::string_view to_string(RowOrder order) noexcept {
  switch (order) {
    case RowOrder::natural: return "none";
    case RowOrder::explicit_perm: return "explicit";
    case RowOrder::implicit_perm: return "implicit";
  }
  return "unknown";
}

RowOrder parse_row_order(std::string_view name) {
  if (name == "none") return RowOrder::natural;
  if (name == "explicit") return RowOrder::explicit_perm;
  if (name == "implicit") return RowOrder::implicit_perm;
  throw FormatError("unknown row order '" + std::string(name) + "' (none, explicit, implicit)");
}

RowPermutation::RowPermutation(std::span<const std::uint32_t> offsets, std::size_t sigma) {
  if (sigma <= 256) {
    storage_ = std::vector<std::uint8_t>(offsets.begin(), offsets.end());
  } else {
    storage_ = std::vector<std::uint16_t>(offsets.begin(), offsets.end());
  }
}

std::size_t RowPermutation::size() const noexcept {
  return std::visit(
      [](const auto& v) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::monostate>) {
          return 0;
        } else {
          return v.size();
        }
      },
      storage_);
}

unsigned RowPermutation::element_bits() const noexcept {
  if (std::holds_alternative<std::vector<std::uint8_t>>(storage_)) return 8;
  if (std::holds_alternative<std::vector<std::uint16_t>>(storage_)) return 16;
  return 0;
}

std::uint32_t RowPermutation::operator[](std::size_t i) const noexcept {
  if (const auto* v = std::get_if<std::vector<std::uint8_t>>(&storage_)) return (*v)[i];
  return std::get<std::vector<std::uint16_t>>(storage_)[i];
}

SlicePlan plan_slices(std::span<const std::size_t> row_lengths, std::size_t slice_size, std::size_t sigma,
                      RowOrder order) {
  if (slice_size == 0) throw FormatError("slice size C must be at least 1");
  if (order != RowOrder::natural) {
    if (sigma == 0 || sigma % slice_size != 0) throw FormatError("sigma must be a positive multiple of C");
    if (sigma > 65536) throw FormatError("sigma must not exceed 65536");
  }
  SlicePlan plan;
  plan.slice_size = slice_size;
  plan.sigma = order == RowOrder::natural ? 1 : sigma;

  const std::size_t n = row_lengths.size();
  plan.storage_to_original.resize(n);
  std::iota(plan.storage_to_original.begin(), plan.storage_to_original.end(), index_t{0});
  if (order != RowOrder::natural) {
    for (std::size_t start = 0; start < n; start += plan.sigma) {
      const auto first = plan.storage_to_original.begin() + static_cast<std::ptrdiff_t>(start);
      const auto last = plan.storage_to_original.begin() + static_cast<std::ptrdiff_t>(std::min(n, start + plan.sigma));
      std::stable_sort(first, last, [&](index_t a, index_t b) { return row_lengths[a] > row_lengths[b]; });
    }
  }

  const std::size_t n_slices = (n + slice_size - 1) / slice_size;
  plan.offset.assign(n_slices + 1, 0);
  for (std::size_t k = 0; k < n_slices; ++k) {
    std::size_t width = 0;
    for (std::size_t i = k * slice_size; i < std::min(n, (k + 1) * slice_size); ++i) {
      width = std::max(width, row_lengths[plan.storage_to_original[i]]);
    }
    plan.offset[k + 1] = plan.offset[k] + width * slice_size;
  }
  return plan;
}

std::vector<std::uint32_t> block_offsets(const SlicePlan& plan) {
  std::vector<std::uint32_t> offsets(plan.storage_to_original.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    offsets[i] = static_cast<std::uint32_t>(plan.storage_to_original[i] - (i / plan.sigma) * plan.sigma);
  }
  return offsets;
}

template <class Value>
SellMatrix<Value>::SellMatrix(std::size_t n_rows, std::size_t n_cols, std::size_t slice_size, std::size_t sigma,
                              RowOrder order, std::vector<Value> val, std::vector<index_t> col,
                              std::vector<offset_t> offset, RowPermutation perm, std::size_t nnz)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      slice_size_(slice_size),
      sigma_(sigma),
      order_(order),
      val_(std::move(val)),
      col_(std::move(col)),
      offset_(std::move(offset)),
      perm_(std::move(perm)),
      nnz_(nnz) {
  if (slice_size_ == 0 || sigma_ == 0) throw FormatError("SELL: C and sigma must be positive");
  if (offset_.size() != (n_rows_ + slice_size_ - 1) / slice_size_ + 1 || offset_.front() != 0) {
    throw FormatError("SELL: offset array does not match the slice count");
  }
  if (val_.size() != col_.size() || val_.size() != offset_.back()) {
    throw FormatError("SELL: val/col length must equal offset[last]");
  }
  for (std::size_t k = 0; k + 1 < offset_.size(); ++k) {
    if (offset_[k + 1] < offset_[k] || (offset_[k + 1] - offset_[k]) % slice_size_ != 0) {
      throw FormatError("SELL: slice widths must be non-negative multiples of C");
    }
  }
  const std::size_t expected_perm = order_ == RowOrder::implicit_perm ? n_rows_ : 0;
  if (perm_.size() != expected_perm) throw FormatError("SELL: perm array must be present exactly for implicit order");
  for (std::size_t i = 0; i < perm_.size(); ++i) {
    if (perm_[i] >= sigma_ || (i / sigma_) * sigma_ + perm_[i] >= n_rows_) {
      throw FormatError("SELL: perm entry out of range");
    }
  }
  for (auto c : col_) {
    if (c >= n_cols_) throw FormatError("SELL: column index out of range");
  }
}

template <class Value>
std::size_t SellMatrix<Value>::storage_bytes() const noexcept {
  return val_.size() * sizeof(Value) + col_.size() * sizeof(index_t) + offset_.size() * sizeof(offset_t) +
         perm_.size() * perm_.element_bits() / 8;
}

template <class Value>
SellMatrix<Value> build_sell(const CsrMatrix& a, const SellOptions& options,
                             std::vector<index_t>* storage_to_original) {
  std::vector<std::size_t> lengths(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) lengths[i] = a.row_nnz(i);
  SlicePlan plan = plan_slices(lengths, options.slice_size, options.sigma, options.order);

  const std::size_t c = plan.slice_size;
  std::vector<Value> val(plan.stored_elements(), Value{});
  std::vector<index_t> col(plan.stored_elements(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const std::size_t k = i / c;
    const std::size_t lane = i % c;
    const std::size_t row = plan.storage_to_original[i];
    const auto cols = a.row_cols(row);
    const auto vals = a.row_values(row);
    const index_t pad_col = cols.empty() ? 0 : cols.back();
    for (std::size_t j = 0; j < plan.slice_width(k); ++j) {
      const std::size_t p = plan.offset[k] + j * c + lane;
      if (j < cols.size()) {
        val[p] = static_cast<Value>(vals[j]);
        col[p] = cols[j];
      } else {
        col[p] = pad_col;
      }
    }
  }

  RowPermutation perm;
  if (options.order == RowOrder::implicit_perm && a.rows() > 0) {
    perm = RowPermutation(block_offsets(plan), plan.sigma);
  }
  if (storage_to_original) *storage_to_original = plan.storage_to_original;
  return SellMatrix<Value>(a.rows(), a.cols(), c, plan.sigma, options.order, std::move(val), std::move(col),
                           std::move(plan.offset), std::move(perm), a.nnz());
}

namespace {

template <class X, class Value, class Perm>
void sell_kernel(const SellMatrix<Value>& m, std::span<const X> x, std::span<X> y, const Perm* perm) {
  const auto val = m.val();
  const auto col = m.col();
  const auto offset = m.offset();
  const std::size_t c = m.slice_size();
  const std::size_t sigma = m.sigma();
  const std::size_t n = m.rows();
  const auto n_slices = static_cast<std::int64_t>(m.n_slices());

#pragma omp parallel for schedule(static) num_threads(num_threads())
  for (std::int64_t k = 0; k < n_slices; ++k) {
    const offset_t s = offset[k];
    const std::size_t w = (offset[k + 1] - s) / c;
    for (std::size_t lane = 0; lane < c; ++lane) {
      const std::size_t i = static_cast<std::size_t>(k) * c + lane;
      if (i >= n) break;
      X t{};
      for (std::size_t j = 0; j < w; ++j) {
        const offset_t p = s + j * c + lane;
        t = t + static_cast<X>(val[p]) * x[col[p]];
      }
      const std::size_t dest = perm ? (i / sigma) * sigma + (*perm)[i] : i;
      y[dest] = t;
    }
  }
}

}  // namespace

template <class X, class Value>
void sell_spmv(const SellMatrix<Value>& m, std::span<const X> x, std::span<X> y) {
  if (x.size() != m.cols() || y.size() != m.rows()) {
    throw DimensionError("sell_spmv: vector length does not match matrix shape");
  }
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, std::monostate>) {
          sell_kernel<X, Value, std::vector<std::uint8_t>>(m, x, y, nullptr);
        } else {
          sell_kernel<X, Value, P>(m, x, y, &p);
        }
      },
      m.perm().storage());
}

std::size_t sell_stored_elements(const CsrMatrix& a, const SellOptions& options) {
  std::vector<std::size_t> lengths(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) lengths[i] = a.row_nnz(i);
  return plan_slices(lengths, options.slice_size, options.sigma, options.order).stored_elements();
}

#define PACKSELL_SELL_INSTANTIATE(V)                                                                      \
  template class SellMatrix<V>;                                                                          \
  template SellMatrix<V> build_sell<V>(const CsrMatrix&, const SellOptions&, std::vector<index_t>*);    \
  template void sell_spmv<double, V>(const SellMatrix<V>&, std::span<const double>, std::span<double>); \
  template void sell_spmv<float, V>(const SellMatrix<V>&, std::span<const float>, std::span<float>);    \
  template void sell_spmv<Half, V>(const SellMatrix<V>&, std::span<const Half>, std::span<Half>);

PACKSELL_SELL_INSTANTIATE(double)
PACKSELL_SELL_INSTANTIATE(float)
PACKSELL_SELL_INSTANTIATE(Half)

#undef PACKSELL_SELL_INSTANTIATE

}  // namespace packsell
