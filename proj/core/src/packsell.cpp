#include "packsell/packsell.hpp"

#include <algorithm>

#include "packsell/errors.hpp"
#include "packsell/parallel.hpp"

namespace packsell {

DeltaStream build_delta_stream(std::span<const index_t> cols, std::span<const double> vals, std::size_t start,
                               const PackFormat& format) {
  DeltaStream stream;
  if (cols.empty()) return stream;
  if (cols.front() < start) {
    throw FormatError("leftmost column " + std::to_string(cols.front()) + " precedes the row offset " +
                      std::to_string(start));
  }
  stream.reserve(cols.size());
  std::uint64_t previous = start;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::uint64_t gap = cols[k] - previous;
    if (gap <= format.max_direct_delta()) {
      stream.push_back({gap, true, vals[k]});
    } else {
      for (std::uint64_t remaining = gap; remaining > 0;) {
        const std::uint64_t step = std::min(remaining, format.max_dummy_delta());
        stream.push_back({step, false, 0.0});
        remaining -= step;
      }
      stream.push_back({0, true, vals[k]});
    }
    previous = cols[k];
  }
  return stream;
}

PackSellMatrix::PackSellMatrix(std::size_t n_rows, std::size_t n_cols, std::size_t slice_size, std::size_t sigma,
                               RowOrder order, PackFormat format, PackArray pack, std::vector<offset_t> offset,
                               RowPermutation perm, std::size_t k_left, EntryCounts counts)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      slice_size_(slice_size),
      sigma_(sigma),
      order_(order),
      format_(format),
      pack_(std::move(pack)),
      offset_(std::move(offset)),
      perm_(std::move(perm)),
      k_left_(k_left),
      counts_(counts) {
  format_.validate();
  if (n_rows_ >= (std::size_t{1} << 31) || n_cols_ >= (std::size_t{1} << 31)) {
    throw FormatError("PackSELL: matrix dimensions must be below 2^31");
  }
  if ((format_.word_bits == 32) != std::holds_alternative<std::vector<std::uint32_t>>(pack_)) {
    throw FormatError("PackSELL: word array type does not match W");
  }
  if (slice_size_ == 0) throw FormatError("PackSELL: C must be positive");
  if (order_ == RowOrder::natural ? sigma_ != 1 : (sigma_ == 0 || sigma_ % slice_size_ != 0 || sigma_ > 65536)) {
    throw FormatError("PackSELL: sigma must be 1 for natural order and a multiple of C otherwise");
  }
  if (offset_.size() != (n_rows_ + slice_size_ - 1) / slice_size_ + 1 || offset_.front() != 0) {
    throw FormatError("PackSELL: offset array does not match the slice count");
  }
  for (std::size_t k = 0; k + 1 < offset_.size(); ++k) {
    if (offset_[k + 1] < offset_[k] || (offset_[k + 1] - offset_[k]) % slice_size_ != 0) {
      throw FormatError("PackSELL: slice widths must be non-negative multiples of C");
    }
  }
  const std::size_t words = std::visit([](const auto& v) { return v.size(); }, pack_);
  if (words != offset_.back()) throw FormatError("PackSELL: pack length must equal offset[last]");

  const std::size_t expected_perm = order_ == RowOrder::implicit_perm ? n_rows_ : 0;
  if (perm_.size() != expected_perm) throw FormatError("PackSELL: perm array must be present exactly for implicit order");
  if (!perm_.empty() && perm_.element_bits() != (sigma_ <= 256 ? 8u : 16u)) {
    throw FormatError("PackSELL: perm element width does not match sigma");
  }
  std::vector<bool> seen(perm_.size(), false);
  for (std::size_t i = 0; i < perm_.size(); ++i) {
    const std::size_t dest = (i / sigma_) * sigma_ + perm_[i];
    if (perm_[i] >= sigma_ || dest >= n_rows_ || seen[dest]) throw FormatError("PackSELL: perm is not a block permutation");
    seen[dest] = true;
  }

  // Walk every chain: all x reads in bounds, and the flags agree with the
  // recorded counts.
  // Words are widened to 64 bits here, so the shift that clears the value
  // field must also clear the unused high bits.
  const WordFields<std::uint64_t> fields{format_.delta_bits, format_.value_bits() + 64 - format_.word_bits};
  EntryCounts observed;
  for (std::size_t k = 0; k + 1 < offset_.size(); ++k) {
    const std::size_t width = (offset_[k + 1] - offset_[k]) / slice_size_;
    for (std::size_t lane = 0; lane < slice_size_; ++lane) {
      const std::size_t i = k * slice_size_ + lane;
      std::uint64_t c = i < n_rows_ ? start_column(i) : 0;
      for (std::size_t j = 0; j < width; ++j) {
        const std::uint64_t w = word(offset_[k] + j * slice_size_ + lane);
        const std::uint64_t delta = fields.delta(w);
        if (fields.flag(w)) {
          ++observed.nnz_real;
        } else if (delta != 0) {
          ++observed.n_dummy;
        } else {
          ++observed.n_padding;
        }
        if (i >= n_rows_) {
          if (w != 0) throw FormatError("PackSELL: rows past n_rows must hold padding only");
          continue;
        }
        c += delta;
        if (c >= n_cols_) throw FormatError("PackSELL: delta chain leaves the matrix in row " + std::to_string(i));
      }
    }
  }
  if (observed != counts_) throw FormatError("PackSELL: entry counts do not match the word array");
}

std::uint64_t PackSellMatrix::word(std::size_t p) const noexcept {
  return std::visit([p](const auto& v) -> std::uint64_t { return v[p]; }, pack_);
}

std::size_t PackSellMatrix::storage_bytes() const noexcept {
  return stored() * format_.word_bits / 8 + offset_.size() * sizeof(offset_t) +
         perm_.size() * perm_.element_bits() / 8;
}

std::vector<std::pair<index_t, double>> PackSellMatrix::decode_row(std::size_t storage_row) const {
  std::vector<std::pair<index_t, double>> out;
  const std::size_t k = storage_row / slice_size_;
  const std::size_t lane = storage_row % slice_size_;
  const std::size_t width = (offset_[k + 1] - offset_[k]) / slice_size_;
  std::uint64_t c = start_column(storage_row);
  for (std::size_t j = 0; j < width; ++j) {
    const auto e = unpack_word<double>(format_, word(offset_[k] + j * slice_size_ + lane));
    c += e.delta;
    if (e.has_value) out.emplace_back(static_cast<index_t>(c), e.value);
  }
  return out;
}

namespace {

template <class Word>
PackArray pack_words(const std::vector<DeltaStream>& streams, const SlicePlan& plan, const PackFormat& format) {
  std::vector<Word> words(plan.stored_elements(), Word{0});
  const std::size_t c = plan.slice_size;
  for (std::size_t i = 0; i < plan.storage_to_original.size(); ++i) {
    const std::size_t k = i / c;
    const std::size_t lane = i % c;
    const DeltaStream& stream = streams[plan.storage_to_original[i]];
    for (std::size_t j = 0; j < stream.size(); ++j) {
      const StreamEntry& e = stream[j];
      const auto w = pack_word(format, e.has_value ? std::optional<double>(e.value) : std::nullopt, e.delta);
      words[plan.offset[k] + j * c + lane] = static_cast<Word>(w);
    }
  }
  return words;
}

}  // namespace

PackSellMatrix build_packsell(const CsrMatrix& a, const PackSellOptions& options,
                              std::vector<index_t>* storage_to_original) {
  options.format.validate();
  const std::size_t true_k_left = lower_bandwidth(a);
  std::size_t k_left = true_k_left;
  if (options.k_left_override) {
    if (*options.k_left_override < true_k_left) {
      throw FormatError("k_left override is smaller than the lower bandwidth");
    }
    k_left = *options.k_left_override;
  }

  // Validates C and sigma before any encoding work.
  const std::size_t sigma = plan_slices({}, options.slice_size, options.sigma, options.order).sigma;

  std::vector<DeltaStream> streams(a.rows());
  std::vector<std::size_t> lengths(a.rows());
  EntryCounts counts;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const std::size_t start = start_column(r, sigma, k_left, a.cols());
    streams[r] = build_delta_stream(a.row_cols(r), a.row_values(r), start, options.format);
    lengths[r] = streams[r].size();
    counts.n_dummy += streams[r].size() - a.row_nnz(r);
  }
  counts.nnz_real = a.nnz();

  SlicePlan plan = plan_slices(lengths, options.slice_size, options.sigma, options.order);
  counts.n_padding = plan.stored_elements() - counts.nnz_real - counts.n_dummy;

  PackArray pack = options.format.word_bits == 32 ? pack_words<std::uint32_t>(streams, plan, options.format)
                                                  : pack_words<std::uint64_t>(streams, plan, options.format);
  RowPermutation perm;
  if (options.order == RowOrder::implicit_perm && a.rows() > 0) {
    perm = RowPermutation(block_offsets(plan), plan.sigma);
  }
  if (storage_to_original) *storage_to_original = plan.storage_to_original;
  return PackSellMatrix(a.rows(), a.cols(), plan.slice_size, plan.sigma, options.order, options.format,
                        std::move(pack), std::move(plan.offset), std::move(perm), k_left, counts);
}

namespace {

template <class Word, Codec C, class X, class Perm>
void packsell_kernel(const PackSellMatrix& m, const std::vector<Word>& pack, std::span<const X> x, std::span<X> y,
                     const Perm* perm) {
  const WordFields<Word> fields{m.format().delta_bits, m.format().value_bits()};
  const unsigned delta_bits = fields.delta_bits;
  const unsigned value_bits = fields.value_bits;
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
      std::size_t col = m.start_column(i);
      X t{};
      for (std::size_t j = 0; j < w; ++j) {
        const Word word = pack[s + j * c + lane];
        col += fields.delta(word);
        t = t + decode_pattern<C, X>(fields.value(word), delta_bits, value_bits) * x[col];
      }
      const std::size_t dest = perm ? (i / sigma) * sigma + (*perm)[i] : i;
      y[dest] = t;
    }
  }
}

template <class Word, class X, class Perm>
void dispatch_codec(const PackSellMatrix& m, const std::vector<Word>& pack, std::span<const X> x, std::span<X> y,
                    const Perm* perm) {
  switch (m.format().codec) {
    case Codec::fp16: return packsell_kernel<Word, Codec::fp16, X, Perm>(m, pack, x, y, perm);
    case Codec::e8my: return packsell_kernel<Word, Codec::e8my, X, Perm>(m, pack, x, y, perm);
    case Codec::fp32: return packsell_kernel<Word, Codec::fp32, X, Perm>(m, pack, x, y, perm);
  }
}

}  // namespace

template <class X>
void packsell_spmv(const PackSellMatrix& m, std::span<const X> x, std::span<X> y) {
  if (x.size() != m.cols() || y.size() != m.rows()) {
    throw DimensionError("packsell_spmv: vector length does not match matrix shape");
  }
  if (m.cols() == 0) {
    std::fill(y.begin(), y.end(), X{});
    return;
  }
  std::visit(
      [&](const auto& pack, const auto& perm) {
        using P = std::decay_t<decltype(perm)>;
        if constexpr (std::is_same_v<P, std::monostate>) {
          dispatch_codec<typename std::decay_t<decltype(pack)>::value_type, X, std::vector<std::uint8_t>>(
              m, pack, x, y, nullptr);
        } else {
          dispatch_codec<typename std::decay_t<decltype(pack)>::value_type, X, P>(m, pack, x, y, &perm);
        }
      },
      m.pack(), m.perm().storage());
}

template void packsell_spmv<double>(const PackSellMatrix&, std::span<const double>, std::span<double>);
template void packsell_spmv<float>(const PackSellMatrix&, std::span<const float>, std::span<float>);
template void packsell_spmv<Half>(const PackSellMatrix&, std::span<const Half>, std::span<Half>);

Footprint footprint_bits(const PackSellMatrix& m, const CsrMatrix& source) {
  const std::uint64_t overhead =
      64 * static_cast<std::uint64_t>(m.offset().size()) + m.perm().size() * m.perm().element_bits();
  const std::size_t sell_stored = sell_stored_elements(source, {m.slice_size(), m.sigma(), m.order()});
  Footprint f;
  f.pack_bits = static_cast<std::uint64_t>(m.format().word_bits) * m.stored() + overhead;
  f.sell_equiv_bits = static_cast<std::uint64_t>(m.format().sell_value_bits() + 32) * sell_stored + overhead;
  f.ratio = f.sell_equiv_bits == 0 ? 1.0 : static_cast<double>(f.pack_bits) / static_cast<double>(f.sell_equiv_bits);
  return f;
}

CsrMatrix quantize(const CsrMatrix& a, const PackFormat& format) {
  std::vector<double> vals(a.nnz());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = quantize(format, a.values()[k]);
  return a.with_values(std::move(vals));
}

CsrMatrix decode_matrix(const PackSellMatrix& m) {
  CooMatrix coo;
  coo.n_rows = m.rows();
  coo.n_cols = m.cols();
  coo.entries.reserve(m.counts().nnz_real);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const std::size_t dest =
        m.order() == RowOrder::implicit_perm ? (i / m.sigma()) * m.sigma() + m.perm()[i] : i;
    for (const auto& [col, value] : m.decode_row(i)) {
      coo.entries.push_back({static_cast<index_t>(dest), col, value});
    }
  }
  return to_csr(std::move(coo));
}

}  // namespace packsell
