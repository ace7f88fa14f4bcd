#include "packsell/container.hpp"

#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <type_traits>
#include <variant>

#include "packsell/errors.hpp"

namespace packsell {
namespace {

template <class T>
void put(std::ostream& out, T v) {
  std::array<char, sizeof(T)> buf;
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <class T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf;
  if (!in.read(reinterpret_cast<char*>(buf.data()), buf.size())) throw ContainerError("container: unexpected end of data");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

template <class T>
std::vector<T> get_array(std::istream& in, std::uint64_t count) {
  // Grow as data arrives so a corrupt count cannot trigger a huge allocation.
  std::vector<T> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 20)));
  for (std::uint64_t i = 0; i < count; ++i) out.push_back(get<T>(in));
  return out;
}

std::uint8_t order_id(RowOrder order) {
  switch (order) {
    case RowOrder::natural: return 0;
    case RowOrder::explicit_perm: return 1;
    case RowOrder::implicit_perm: return 2;
  }
  return 0;
}

RowOrder order_from_id(std::uint8_t id) {
  switch (id) {
    case 0: return RowOrder::natural;
    case 1: return RowOrder::explicit_perm;
    case 2: return RowOrder::implicit_perm;
    default: throw ContainerError("container: unknown row order id " + std::to_string(id));
  }
}

std::size_t to_size(std::uint64_t v, const char* what) {
  if (v > std::numeric_limits<std::size_t>::max()) throw ContainerError(std::string("container: ") + what + " too large");
  return static_cast<std::size_t>(v);
}

}  // namespace

void write_container(std::ostream& out, const PackSellMatrix& m) {
  out.write(kContainerMagic.data(), kContainerMagic.size());
  const PackFormat& f = m.format();
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.word_bits));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.delta_bits));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(f.codec));
  put<std::uint8_t>(out, order_id(m.order()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.slice_size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(m.sigma()));
  put<std::uint64_t>(out, m.rows());
  put<std::uint64_t>(out, m.cols());
  put<std::uint64_t>(out, m.k_left());
  put<std::uint64_t>(out, m.counts().nnz_real);
  put<std::uint64_t>(out, m.counts().n_dummy);
  put<std::uint64_t>(out, m.counts().n_padding);
  put<std::uint64_t>(out, m.n_slices());
  for (offset_t o : m.offset()) put<std::uint64_t>(out, o);
  std::visit(
      [&](const auto& perm) {
        using P = std::decay_t<decltype(perm)>;
        if constexpr (!std::is_same_v<P, std::monostate>) {
          for (auto v : perm) put<typename P::value_type>(out, v);
        }
      },
      m.perm().storage());
  std::visit(
      [&](const auto& pack) {
        for (auto w : pack) put<typename std::decay_t<decltype(pack)>::value_type>(out, w);
      },
      m.pack());
  if (!out) throw ContainerError("container: write failed");
}

void write_container_file(const std::string& path, const PackSellMatrix& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ContainerError("cannot open '" + path + "' for writing");
  write_container(out, m);
  out.flush();
  if (!out) throw ContainerError("write to '" + path + "' failed");
}

PackSellMatrix read_container(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || std::string_view(magic.data(), magic.size()) != kContainerMagic) {
    throw ContainerError("container: bad magic");
  }
  PackFormat format;
  format.word_bits = get<std::uint8_t>(in);
  format.delta_bits = get<std::uint8_t>(in);
  const auto codec = get<std::uint8_t>(in);
  if (codec > 2) throw ContainerError("container: unknown codec id " + std::to_string(codec));
  format.codec = static_cast<Codec>(codec);
  if (!format.valid()) throw ContainerError("container: invalid word layout " + format.name());
  const RowOrder order = order_from_id(get<std::uint8_t>(in));
  const std::size_t slice_size = get<std::uint32_t>(in);
  const std::size_t sigma = get<std::uint32_t>(in);
  const std::size_t n_rows = to_size(get<std::uint64_t>(in), "n_rows");
  const std::size_t n_cols = to_size(get<std::uint64_t>(in), "n_cols");
  const std::size_t k_left = to_size(get<std::uint64_t>(in), "k_left");
  EntryCounts counts;
  counts.nnz_real = to_size(get<std::uint64_t>(in), "nnz_real");
  counts.n_dummy = to_size(get<std::uint64_t>(in), "n_dummy");
  counts.n_padding = to_size(get<std::uint64_t>(in), "n_padding");
  const std::uint64_t n_slices = get<std::uint64_t>(in);
  if (n_slices == std::numeric_limits<std::uint64_t>::max()) throw ContainerError("container: n_slices too large");

  std::vector<offset_t> offset = get_array<std::uint64_t>(in, n_slices + 1);
  if (offset.front() != 0) throw ContainerError("container: offset array must start at 0");
  for (std::size_t s = 1; s < offset.size(); ++s) {
    if (offset[s] < offset[s - 1]) throw ContainerError("container: offset array is decreasing");
  }

  RowPermutation perm;
  if (order == RowOrder::implicit_perm) {
    if (sigma <= 256) {
      perm = RowPermutation(RowPermutation::Storage(get_array<std::uint8_t>(in, n_rows)));
    } else {
      perm = RowPermutation(RowPermutation::Storage(get_array<std::uint16_t>(in, n_rows)));
    }
  }

  PackArray pack;
  if (format.word_bits == 32) {
    pack = get_array<std::uint32_t>(in, offset.back());
  } else {
    pack = get_array<std::uint64_t>(in, offset.back());
  }
  return PackSellMatrix(n_rows, n_cols, slice_size, sigma, order, format, std::move(pack), std::move(offset),
                        std::move(perm), k_left, counts);
}

PackSellMatrix read_container_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ContainerError("cannot open '" + path + "'");
  return read_container(in);
}

bool is_container_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::array<char, 8> magic{};
  return in.read(magic.data(), magic.size()) && std::string_view(magic.data(), magic.size()) == kContainerMagic;
}

}  // namespace packsell
