#pragma once

#include <bit>
#include <cstdint>

namespace packsell {

/// Round-to-nearest-even conversion to IEEE binary16. Overflow yields
/// infinity, NaN stays NaN.
std::uint16_t double_to_half_bits(double value) noexcept;

/// Exact widening of a binary16 pattern. No branches on the value.
inline float half_bits_to_float(std::uint16_t bits) noexcept {
  const std::uint32_t sign = static_cast<std::uint32_t>(bits & 0x8000u) << 16;
  const std::uint32_t magnitude = bits & 0x7fffu;
  // Place exponent and mantissa in the binary32 field positions, then rebias
  // by 2^(127-15). Subnormal halves land on binary32 subnormals and the
  // multiply normalises them exactly.
  const float scaled = std::bit_cast<float>(magnitude << 13) * 0x1p112f;
  const std::uint32_t special = static_cast<std::uint32_t>(magnitude >= 0x7c00u) * 0x7f800000u;
  return std::bit_cast<float>(std::bit_cast<std::uint32_t>(scaled) | special | sign);
}

/// IEEE binary16 storage type.
///
/// Arithmetic is evaluated in binary32 and rounded back after every
/// operation. Products of two halves are exact in binary32 and binary32 has
/// more than 2*11+2 significand bits, so the result equals a correctly
/// rounded binary16 operation.
class Half {
 public:
  constexpr Half() noexcept = default;
  explicit Half(double value) noexcept : bits_(double_to_half_bits(value)) {}
  explicit Half(float value) noexcept : bits_(double_to_half_bits(value)) {}

  static constexpr Half from_bits(std::uint16_t bits) noexcept {
    Half h;
    h.bits_ = bits;
    return h;
  }

  constexpr std::uint16_t bits() const noexcept { return bits_; }
  explicit operator float() const noexcept { return half_bits_to_float(bits_); }
  explicit operator double() const noexcept { return half_bits_to_float(bits_); }

  bool is_finite() const noexcept { return (bits_ & 0x7c00u) != 0x7c00u; }

  friend Half operator+(Half a, Half b) noexcept { return Half(float(a) + float(b)); }
  friend Half operator-(Half a, Half b) noexcept { return Half(float(a) - float(b)); }
  friend Half operator*(Half a, Half b) noexcept { return Half(float(a) * float(b)); }
  friend Half operator-(Half a) noexcept { return from_bits(a.bits_ ^ 0x8000u); }

  /// Bitwise identity, not numeric equality (+0 != -0, NaN == same NaN).
  friend constexpr bool operator==(Half a, Half b) noexcept = default;

 private:
  std::uint16_t bits_ = 0;
};

inline constexpr double kHalfMax = 65504.0;

}  // namespace packsell
