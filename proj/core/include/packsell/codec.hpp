#pragma once

#include <bit>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include "packsell/half.hpp"

namespace packsell {

/// Value representations that fit the V-bit value field of a packed word.
enum class Codec : std::uint8_t {
  fp16 = 0,  ///< IEEE half embedded directly (V = 16)
  e8my = 1,  ///< sign, 8 exponent bits, Y = 22 - D mantissa bits; a truncated FP32 (W = 32)
  fp32 = 2,  ///< lossless FP32 embedding (W = 64, V >= 32); used for oracle testing
};

/// Layout of a W-bit word: [value : V][delta : D][flag : 1], W = V + D + 1.
///
/// flag = 1 words carry a value and a delta below 2^D. flag = 0 words carry
/// no value and use all W - 1 upper bits for the delta, so the largest
/// representable delta is 2^(W-1) - 1.
struct PackFormat {
  unsigned word_bits = 32;
  unsigned delta_bits = 15;
  Codec codec = Codec::fp16;

  /// W = 32, D = 15, FP16 values.
  static PackFormat fp16() noexcept { return {32, 15, Codec::fp16}; }
  /// W = 32, E8MY with the given mantissa width (D = 22 - Y).
  static PackFormat e8m(unsigned mantissa_bits);
  /// W = 64, D = 31, FP32 values.
  static PackFormat fp32_lossless() noexcept { return {64, 31, Codec::fp32}; }
  /// "fp16", "e8m<Y>", "fp32".
  static PackFormat parse(std::string_view name);

  unsigned value_bits() const noexcept { return word_bits - delta_bits - 1; }
  /// Stored significand bits (excluding the implicit leading one).
  unsigned mantissa_bits() const noexcept;
  std::uint64_t max_direct_delta() const noexcept { return (std::uint64_t{1} << delta_bits) - 1; }
  std::uint64_t max_dummy_delta() const noexcept { return (std::uint64_t{1} << (word_bits - 1)) - 1; }
  /// Bits per value in the equivalent SELL matrix (FP16 or FP32 storage).
  unsigned sell_value_bits() const noexcept { return codec == Codec::fp16 ? 16 : 32; }

  /// Throws FormatError when the combination is not one of the supported
  /// layouts.
  void validate() const;
  bool valid() const noexcept;
  std::string name() const;

  friend bool operator==(const PackFormat&, const PackFormat&) = default;
};

/// V-bit pattern for `value`. Throws CodecError for non-finite input or
/// when rounding overflows to infinity. E8MY rounds to FP32 first, flushes
/// FP32 subnormals to signed zero, then rounds to Y mantissa bits with ties
/// away from zero.
std::uint64_t encode_value(const PackFormat& format, double value);

/// Value widened from a V-bit pattern. Works for every pattern, not only
/// ones produced by encode_value.
template <Codec C, class T>
T decode_pattern(std::uint64_t pattern, unsigned delta_bits, unsigned value_bits) noexcept {
  if constexpr (C == Codec::fp16) {
    const Half h = Half::from_bits(static_cast<std::uint16_t>(pattern));
    if constexpr (std::is_same_v<T, Half>) {
      return h;
    } else {
      return static_cast<T>(static_cast<float>(h));
    }
  } else if constexpr (C == Codec::e8my) {
    return static_cast<T>(std::bit_cast<float>(static_cast<std::uint32_t>(pattern << (delta_bits + 1))));
  } else {
    return static_cast<T>(std::bit_cast<float>(static_cast<std::uint32_t>(pattern >> (value_bits - 32))));
  }
}

template <class T>
T decode_value(const PackFormat& format, std::uint64_t pattern) noexcept {
  switch (format.codec) {
    case Codec::fp16: return decode_pattern<Codec::fp16, T>(pattern, format.delta_bits, format.value_bits());
    case Codec::e8my: return decode_pattern<Codec::e8my, T>(pattern, format.delta_bits, format.value_bits());
    case Codec::fp32: return decode_pattern<Codec::fp32, T>(pattern, format.delta_bits, format.value_bits());
  }
  return T{};
}

/// decode(encode(value)) as a double.
double quantize(const PackFormat& format, double value);

/// Branch-free field extraction for one word type.
template <std::unsigned_integral Word>
struct WordFields {
  unsigned delta_bits;
  unsigned value_bits;

  static constexpr Word flag(Word w) noexcept { return w & Word{1}; }

  /// Shift out the value field only when the flag is set, then drop the flag.
  constexpr Word delta(Word w) const noexcept {
    const unsigned shift = static_cast<unsigned>(w & Word{1}) * value_bits;
    return static_cast<Word>(static_cast<Word>(w << shift) >> (shift + 1));
  }

  /// Value pattern, forced to zero when the flag is clear.
  constexpr Word value(Word w) const noexcept {
    return static_cast<Word>(static_cast<Word>(w >> (delta_bits + 1)) * (w & Word{1}));
  }
};

namespace detail {
[[noreturn]] void throw_delta_range(const PackFormat& format, std::uint64_t delta, bool dummy);
}  // namespace detail

/// Assembles a word. A present value requires delta <= 2^D - 1; an absent
/// value (dummy or padding) requires delta <= 2^(W-1) - 1. Throws
/// FormatError when the delta is out of range and CodecError from
/// encode_value.
inline std::uint64_t pack_word(const PackFormat& format, std::optional<double> value, std::uint64_t delta) {
  if (value) {
    if (delta > format.max_direct_delta()) detail::throw_delta_range(format, delta, false);
    return (encode_value(format, *value) << (format.delta_bits + 1)) | (delta << 1) | 1u;
  }
  if (delta > format.max_dummy_delta()) detail::throw_delta_range(format, delta, true);
  return delta << 1;
}

template <class T>
struct UnpackedEntry {
  T value{};
  std::uint64_t delta = 0;
  bool has_value = false;
};

template <class T>
UnpackedEntry<T> unpack_word(const PackFormat& format, std::uint64_t word) noexcept {
  const unsigned d = format.delta_bits;
  const unsigned v = format.value_bits();
  UnpackedEntry<T> e;
  if (format.word_bits == 32) {
    const WordFields<std::uint32_t> f{d, v};
    const auto w = static_cast<std::uint32_t>(word);
    e.has_value = f.flag(w) != 0;
    e.delta = f.delta(w);
    e.value = decode_value<T>(format, f.value(w));
  } else {
    const WordFields<std::uint64_t> f{d, v};
    e.has_value = f.flag(word) != 0;
    e.delta = f.delta(word);
    e.value = decode_value<T>(format, f.value(word));
  }
  return e;
}

}  // namespace packsell
