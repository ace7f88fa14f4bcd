#include "packsell/codec.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "packsell/errors.hpp"

namespace packsell {

PackFormat PackFormat::e8m(unsigned mantissa_bits) {
  if (mantissa_bits > 21) throw FormatError("E8MY needs Y <= 21 (D >= 1)");
  return {32, 22 - mantissa_bits, Codec::e8my};
}

PackFormat PackFormat::parse(std::string_view name) {
  if (name == "fp16") return fp16();
  if (name == "fp32") return fp32_lossless();
  if (name.starts_with("e8m")) {
    unsigned y = 0;
    const auto digits = name.substr(3);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), y);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) return e8m(y);
  }
  throw FormatError("unknown value format '" + std::string(name) + "' (fp16, e8m<Y>, fp32)");
}

unsigned PackFormat::mantissa_bits() const noexcept {
  switch (codec) {
    case Codec::fp16: return 10;
    case Codec::e8my: return 22 - delta_bits;
    case Codec::fp32: return 23;
  }
  return 0;
}

bool PackFormat::valid() const noexcept {
  if (word_bits != 32 && word_bits != 64) return false;
  if (delta_bits < 1 || delta_bits > word_bits - 2) return false;
  switch (codec) {
    case Codec::fp16: return value_bits() == 16;
    case Codec::e8my: return word_bits == 32 && delta_bits <= 22;
    case Codec::fp32: return word_bits == 64 && value_bits() >= 32;
  }
  return false;
}

void PackFormat::validate() const {
  if (valid()) return;
  throw FormatError("unsupported word layout: W=" + std::to_string(word_bits) + " D=" +
                    std::to_string(delta_bits) + " codec=" + std::to_string(static_cast<int>(codec)));
}

std::string PackFormat::name() const {
  switch (codec) {
    case Codec::fp16: return "fp16";
    case Codec::e8my: return "e8m" + std::to_string(mantissa_bits());
    case Codec::fp32: return "fp32";
  }
  return "unknown";
}

namespace {

std::uint64_t encode_e8my(double value, unsigned delta_bits) {
  float f = static_cast<float>(value);
  if (!std::isfinite(f)) throw CodecError("E8MY: value overflows FP32");
  if (std::fabs(f) < std::numeric_limits<float>::min()) f = std::copysign(0.0f, f);

  int exponent = 0;
  std::frexp(f, &exponent);
  const float scale = std::ldexp(1.0f, exponent - 24 + static_cast<int>(delta_bits) + 1);
  const float rounded = std::round(f / scale) * scale;
  if (!std::isfinite(rounded)) throw CodecError("E8MY: rounding overflows to infinity");
  return std::bit_cast<std::uint32_t>(rounded) >> (delta_bits + 1);
}

}  // namespace

std::uint64_t encode_value(const PackFormat& format, double value) {
  if (!std::isfinite(value)) throw CodecError("cannot encode a non-finite value");
  switch (format.codec) {
    case Codec::fp16: {
      const Half h(value);
      if (!h.is_finite()) throw CodecError("FP16: |value| exceeds 65504 after rounding");
      return h.bits();
    }
    case Codec::e8my:
      return encode_e8my(value, format.delta_bits);
    case Codec::fp32: {
      const auto f = static_cast<float>(value);
      if (!std::isfinite(f)) throw CodecError("FP32: value overflows");
      return static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(f)) << (format.value_bits() - 32);
    }
  }
  throw FormatError("unknown codec");
}

double quantize(const PackFormat& format, double value) {
  return decode_value<double>(format, encode_value(format, value));
}

namespace detail {

void throw_delta_range(const PackFormat& format, std::uint64_t delta, bool dummy) {
  if (dummy) throw FormatError("dummy delta exceeds 2^(W-1) - 1");
  throw FormatError("delta " + std::to_string(delta) + " does not fit in " + std::to_string(format.delta_bits) +
                    " bits");
}

}  // namespace detail

}  // namespace packsell
