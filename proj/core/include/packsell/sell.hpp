#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "packsell/half.hpp"
#include "packsell/matrix.hpp"

namespace packsell {

/// How rows are sorted within sigma-blocks.
///  - natural: no reordering (sigma is treated as 1)
///  - explicit_perm: the stored matrix *is* the reordered matrix; SpMV
///    output comes back in storage order
///  - implicit_perm: storage is reordered but a perm array restores the
///    original order when writing y
enum class RowOrder : std::uint8_t { natural = 0, explicit_perm = 1, implicit_perm = 2 };

std::string_view to_string(RowOrder order) noexcept;
/// Accepts "none", "explicit", "implicit".
RowOrder parse_row_order(std::string_view name);

/// Within-block row offsets for implicit permutation: entry i holds the
/// offset inside its sigma-block of the original row stored at position i.
/// Element width is 8 bits for sigma <= 256 and 16 bits otherwise.
class RowPermutation {
 public:
  using Storage = std::variant<std::monostate, std::vector<std::uint8_t>, std::vector<std::uint16_t>>;

  RowPermutation() = default;
  RowPermutation(std::span<const std::uint32_t> offsets, std::size_t sigma);
  explicit RowPermutation(Storage storage) : storage_(std::move(storage)) {}

  bool empty() const noexcept { return size() == 0; }
  std::size_t size() const noexcept;
  unsigned element_bits() const noexcept;
  std::uint32_t operator[](std::size_t i) const noexcept;
  const Storage& storage() const noexcept { return storage_; }

  friend bool operator==(const RowPermutation&, const RowPermutation&) = default;

 private:
  Storage storage_;
};

/// Row placement for any slice-aligned format: rows sorted by descending
/// length within sigma-blocks (stable), grouped into slices of C rows, and
/// every slice padded to its longest row.
struct SlicePlan {
  std::size_t slice_size = 1;
  std::size_t sigma = 1;  // effective block size; 1 for natural order
  std::vector<index_t> storage_to_original;
  std::vector<offset_t> offset;  // n_slices + 1 entries, in elements

  std::size_t n_slices() const noexcept { return offset.size() - 1; }
  std::size_t stored_elements() const noexcept { return offset.back(); }
  std::size_t slice_width(std::size_t k) const noexcept { return (offset[k + 1] - offset[k]) / slice_size; }
};

/// Throws FormatError when C == 0 or (for a non-natural order) sigma is not
/// a positive multiple of C, or sigma > 65536.
SlicePlan plan_slices(std::span<const std::size_t> row_lengths, std::size_t slice_size, std::size_t sigma,
                      RowOrder order);

/// Within-block offsets (perm entries) for a plan.
std::vector<std::uint32_t> block_offsets(const SlicePlan& plan);

struct SellOptions {
  std::size_t slice_size = 32;
  std::size_t sigma = 256;
  RowOrder order = RowOrder::implicit_perm;
};

/// SELL-C-sigma storage. Elements are column-major inside each slice;
/// padding entries hold value 0 and repeat the row's last column (0 for
/// empty rows).
template <class Value>
class SellMatrix {
 public:
  SellMatrix() = default;
  SellMatrix(std::size_t n_rows, std::size_t n_cols, std::size_t slice_size, std::size_t sigma, RowOrder order,
             std::vector<Value> val, std::vector<index_t> col, std::vector<offset_t> offset, RowPermutation perm,
             std::size_t nnz);

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }
  std::size_t slice_size() const noexcept { return slice_size_; }
  std::size_t sigma() const noexcept { return sigma_; }
  RowOrder order() const noexcept { return order_; }
  std::size_t nnz() const noexcept { return nnz_; }
  std::size_t stored() const noexcept { return val_.size(); }
  std::size_t padding() const noexcept { return stored() - nnz_; }
  std::size_t n_slices() const noexcept { return offset_.size() - 1; }

  std::span<const Value> val() const noexcept { return val_; }
  std::span<const index_t> col() const noexcept { return col_; }
  std::span<const offset_t> offset() const noexcept { return offset_; }
  const RowPermutation& perm() const noexcept { return perm_; }

  std::size_t storage_bytes() const noexcept;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::size_t slice_size_ = 1;
  std::size_t sigma_ = 1;
  RowOrder order_ = RowOrder::natural;
  std::vector<Value> val_;
  std::vector<index_t> col_;
  std::vector<offset_t> offset_{0};
  RowPermutation perm_;
  std::size_t nnz_ = 0;
};

/// Builds SELL-C-sigma with values rounded to `Value`. For explicit_perm the
/// storage-to-original row map is written to `storage_to_original` when
/// non-null.
template <class Value>
SellMatrix<Value> build_sell(const CsrMatrix& a, const SellOptions& options,
                             std::vector<index_t>* storage_to_original = nullptr);

/// y = A x in the precision of X, each row accumulated in stored order.
/// Implicit order writes y in original row order, the others in storage
/// order.
template <class X, class Value>
void sell_spmv(const SellMatrix<Value>& m, std::span<const X> x, std::span<X> y);

template <class X, class Value>
std::vector<X> sell_spmv(const SellMatrix<Value>& m, std::span<const X> x) {
  std::vector<X> y(m.rows());
  sell_spmv<X, Value>(m, x, y);
  return y;
}

/// Stored element count (nonzeros + padding) of a SELL build, without
/// materialising it.
std::size_t sell_stored_elements(const CsrMatrix& a, const SellOptions& options);

}  // namespace packsell
