#include "packsell/half.hpp"

#include <cmath>

namespace packsell {

std::uint16_t double_to_half_bits(double value) noexcept {
  const std::uint16_t sign = std::signbit(value) ? 0x8000u : 0u;
  const double magnitude = std::fabs(value);

  if (std::isnan(value)) return static_cast<std::uint16_t>(sign | 0x7e00u);
  // 65520 is the midpoint between 65504 and 2^16; ties go to the even
  // neighbour, which is the infinity encoding.
  if (magnitude >= 65520.0) return static_cast<std::uint16_t>(sign | 0x7c00u);

  if (magnitude < 0x1p-14) {
    // Subnormal range: count units of 2^-24. A result of 1024 is the
    // smallest normal, whose encoding is also 1024.
    const auto units = static_cast<std::uint16_t>(std::nearbyint(magnitude * 0x1p24));
    return static_cast<std::uint16_t>(sign | units);
  }

  int exponent = 0;
  std::frexp(magnitude, &exponent);  // magnitude = m * 2^exponent, m in [0.5, 1)
  int unbiased = exponent - 1;
  auto significand = static_cast<std::uint32_t>(std::nearbyint(std::ldexp(magnitude, 10 - unbiased)));
  if (significand == 2048u) {
    significand = 1024u;
    ++unbiased;
  }
  if (unbiased > 15) return static_cast<std::uint16_t>(sign | 0x7c00u);
  const auto biased = static_cast<std::uint32_t>(unbiased + 15);
  return static_cast<std::uint16_t>(sign | (biased << 10) | (significand - 1024u));
}

}  // namespace packsell
