#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "packsell/codec.hpp"
#include "packsell/matrix.hpp"
#include "packsell/sell.hpp"

namespace packsell {

/// Block-uniform leftmost offset: the sigma-block start minus k_left, or 0
/// when k_left reaches past the block start. Identical for every row of a
/// block, so it can be recomputed from the storage row index alone.
constexpr std::size_t leftmost_offset(std::size_t row, std::size_t sigma, std::size_t k_left) noexcept {
  const std::size_t block_start = (row / sigma) * sigma;
  return k_left < block_start ? block_start - k_left : 0;
}

/// Column the delta chain of a row starts from. Equals leftmost_offset for
/// every row that has a nonzero; only empty rows past the last column are
/// pulled back to n_cols - 1 so padding reads stay inside x.
constexpr std::size_t start_column(std::size_t row, std::size_t sigma, std::size_t k_left,
                                   std::size_t n_cols) noexcept {
  const std::size_t d = leftmost_offset(row, sigma, k_left);
  return n_cols == 0 ? 0 : (d < n_cols ? d : n_cols - 1);
}

struct StreamEntry {
  std::uint64_t delta = 0;
  bool has_value = false;
  double value = 0.0;

  friend bool operator==(const StreamEntry&, const StreamEntry&) = default;
};

/// One row as delta-encoded entries with dummies inserted for gaps that do
/// not fit in D bits.
using DeltaStream = std::vector<StreamEntry>;

/// Encodes one row. The first delta is measured from `start`; each later
/// one from the previous column. A gap of 2^D or more becomes a dummy
/// (flag 0) carrying the whole gap followed by the real entry with delta 0;
/// gaps beyond 2^(W-1) - 1 become a chain of dummies. Throws FormatError if
/// the leftmost column lies before `start`.
DeltaStream build_delta_stream(std::span<const index_t> cols, std::span<const double> vals, std::size_t start,
                               const PackFormat& format);

struct EntryCounts {
  std::size_t nnz_real = 0;
  std::size_t n_dummy = 0;
  std::size_t n_padding = 0;

  friend bool operator==(const EntryCounts&, const EntryCounts&) = default;
};

struct PackSellOptions {
  std::size_t slice_size = 32;
  std::size_t sigma = 256;
  RowOrder order = RowOrder::implicit_perm;
  PackFormat format = PackFormat::fp16();
  /// Replaces the computed lower bandwidth; must not be smaller than it.
  /// A value >= n_rows forces every leftmost offset to 0.
  std::optional<std::size_t> k_left_override;
};

using PackArray = std::variant<std::vector<std::uint32_t>, std::vector<std::uint64_t>>;

/// SELL-C-sigma layout over packed (value, delta) words. Immutable once
/// constructed; the constructor checks structural consistency and that
/// every column reached by a delta chain lies inside the matrix.
class PackSellMatrix {
 public:
  PackSellMatrix() = default;
  PackSellMatrix(std::size_t n_rows, std::size_t n_cols, std::size_t slice_size, std::size_t sigma, RowOrder order,
                 PackFormat format, PackArray pack, std::vector<offset_t> offset, RowPermutation perm,
                 std::size_t k_left, EntryCounts counts);

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }
  std::size_t slice_size() const noexcept { return slice_size_; }
  /// Effective block size; 1 for natural order.
  std::size_t sigma() const noexcept { return sigma_; }
  RowOrder order() const noexcept { return order_; }
  const PackFormat& format() const noexcept { return format_; }
  const PackArray& pack() const noexcept { return pack_; }
  std::size_t stored() const noexcept { return offset_.back(); }
  std::span<const offset_t> offset() const noexcept { return offset_; }
  std::size_t n_slices() const noexcept { return offset_.size() - 1; }
  const RowPermutation& perm() const noexcept { return perm_; }
  std::size_t k_left() const noexcept { return k_left_; }
  const EntryCounts& counts() const noexcept { return counts_; }

  std::size_t start_column(std::size_t storage_row) const noexcept {
    return packsell::start_column(storage_row, sigma_, k_left_, n_cols_);
  }
  std::uint64_t word(std::size_t p) const noexcept;
  std::size_t storage_bytes() const noexcept;

  /// Reconstructed (column, value) pairs of a storage row, dummies and
  /// padding skipped.
  std::vector<std::pair<index_t, double>> decode_row(std::size_t storage_row) const;

  friend bool operator==(const PackSellMatrix&, const PackSellMatrix&) = default;

 private:
  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::size_t slice_size_ = 1;
  std::size_t sigma_ = 1;
  RowOrder order_ = RowOrder::natural;
  PackFormat format_;
  PackArray pack_;
  std::vector<offset_t> offset_{0};
  RowPermutation perm_;
  std::size_t k_left_ = 0;
  EntryCounts counts_;
};

/// Pipeline: lower bandwidth, per-row delta streams with dummies, sigma-sort
/// by stored entries (real + dummy), slice padding with all-zero words,
/// column-major packing. Throws CodecError when a value does not fit the
/// codec.
PackSellMatrix build_packsell(const CsrMatrix& a, const PackSellOptions& options,
                              std::vector<index_t>* storage_to_original = nullptr);

/// y = A x in the precision of X. Each row starts its column accumulator at
/// its leftmost offset, adds the unpacked delta of every word, and
/// accumulates value * x[column]. Requires finite x.
template <class X>
void packsell_spmv(const PackSellMatrix& m, std::span<const X> x, std::span<X> y);

template <class X>
std::vector<X> packsell_spmv(const PackSellMatrix& m, std::span<const X> x) {
  std::vector<X> y(m.rows());
  packsell_spmv<X>(m, x, y);
  return y;
}

struct Footprint {
  std::uint64_t pack_bits = 0;
  std::uint64_t sell_equiv_bits = 0;
  double ratio = 1.0;
};

/// Storage of the packed matrix against SELL with the same C, sigma, order
/// and value width (16 bits for fp16, 32 otherwise) plus 32-bit columns.
/// Both sides include the offset array (64 bits per entry) and perm array.
Footprint footprint_bits(const PackSellMatrix& m, const CsrMatrix& source);

/// The stored matrix as CSR, rows in the order packsell_spmv writes y
/// (original order except for explicit_perm, which keeps storage order).
CsrMatrix decode_matrix(const PackSellMatrix& m);

/// Elementwise decode(encode(a_ij)).
CsrMatrix quantize(const CsrMatrix& a, const PackFormat& format);

}  // namespace packsell
