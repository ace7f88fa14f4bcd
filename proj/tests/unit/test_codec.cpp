#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "packsell/codec.hpp"
#include "packsell/errors.hpp"

using namespace packsell;
using packsell::testing::assemble_word;
using packsell::testing::e8my_bits;

namespace {

float e8my_value(double v, unsigned d) { return std::bit_cast<float>(e8my_bits(v, d)); }

}  // namespace

TEST(PackFormat, PresetsAndNames) {
  EXPECT_EQ(PackFormat::fp16().value_bits(), 16u);
  EXPECT_EQ(PackFormat::fp16().name(), "fp16");
  EXPECT_EQ(PackFormat::e8m(20).delta_bits, 2u);
  EXPECT_EQ(PackFormat::e8m(20).name(), "e8m20");
  EXPECT_EQ(PackFormat::e8m(10).delta_bits, 12u);
  EXPECT_EQ(PackFormat::fp32_lossless().word_bits, 64u);
  EXPECT_EQ(PackFormat::parse("e8m14"), PackFormat::e8m(14));
  EXPECT_EQ(PackFormat::parse("fp32"), PackFormat::fp32_lossless());
  EXPECT_THROW(PackFormat::parse("e8m"), FormatError);
  EXPECT_THROW(PackFormat::parse("bf16"), FormatError);
  EXPECT_EQ(PackFormat::fp16().max_direct_delta(), 32767u);
  EXPECT_EQ(PackFormat::fp16().max_dummy_delta(), 0x7fffffffu);
}

TEST(PackFormat, Validation) {
  EXPECT_TRUE((PackFormat{32, 15, Codec::fp16}).valid());
  EXPECT_TRUE((PackFormat{64, 47, Codec::fp16}).valid());
  EXPECT_FALSE((PackFormat{32, 14, Codec::fp16}).valid());
  EXPECT_FALSE((PackFormat{64, 2, Codec::e8my}).valid());
  EXPECT_FALSE((PackFormat{64, 32, Codec::fp32}).valid());  // V = 31 < 32
  EXPECT_FALSE((PackFormat{48, 15, Codec::fp16}).valid());
  EXPECT_FALSE((PackFormat{32, 0, Codec::e8my}).valid());
  EXPECT_THROW((PackFormat{16, 1, Codec::e8my}).validate(), FormatError);
}

// Goldens are checked against the field-assembly oracle first, then frozen.
TEST(Codec, GoldenWords) {
  const PackFormat f = PackFormat::fp16();
  ASSERT_EQ(assemble_word(32, 15, true, 3, 0x3C00), 0x3C000007u);
  EXPECT_EQ(pack_word(f, 1.0, 3), 0x3C000007u);
  ASSERT_EQ(assemble_word(32, 15, false, 70000, 0), 0x000222E0u);
  EXPECT_EQ(pack_word(f, std::nullopt, 70000), 0x000222E0u);
  ASSERT_EQ(assemble_word(32, 15, false, 0, 0), 0u);
  EXPECT_EQ(pack_word(f, std::nullopt, 0), 0u);

  const auto e = unpack_word<double>(f, 0x3C000007u);
  EXPECT_EQ(e.value, 1.0);
  EXPECT_EQ(e.delta, 3u);
  EXPECT_TRUE(e.has_value);
  const auto z = unpack_word<double>(f, 0);
  EXPECT_FALSE(z.has_value);
  EXPECT_EQ(z.delta, 0u);
  EXPECT_FALSE(std::signbit(z.value));
  EXPECT_EQ(z.value, 0.0);
}

TEST(Codec, E8m20OfOneTenth) {
  // Independent: round(v / s) * s with s = 2^(e - 21), e from frexp.
  const float v = 0.1f;
  ASSERT_EQ(std::bit_cast<std::uint32_t>(v), 0x3DCCCCCDu);
  int e = 0;
  std::frexp(v, &e);
  const double s = std::ldexp(1.0, e - 21);
  const auto q = static_cast<float>(std::round(v / s) * s);
  ASSERT_EQ(std::bit_cast<std::uint32_t>(q), 0x3DCCCCD0u);
  ASSERT_EQ(std::bit_cast<std::uint32_t>(q) & 0x7u, 0u);
  ASSERT_EQ(e8my_bits(0.1, 2), 0x3DCCCCD0u);

  const PackFormat f = PackFormat::e8m(20);
  const std::uint64_t pattern = encode_value(f, 0.1);
  EXPECT_EQ(pattern << 3, 0x3DCCCCD0u);
  EXPECT_EQ(std::bit_cast<std::uint32_t>(decode_value<float>(f, pattern)), 0x3DCCCCD0u);
  EXPECT_EQ(pack_word(f, 0.1, 0), 0x3DCCCCD1u);
  EXPECT_EQ(quantize(f, 0.1), static_cast<double>(std::bit_cast<float>(0x3DCCCCD0u)));
}

TEST(Codec, SimpleEncodings) {
  EXPECT_EQ(encode_value(PackFormat::fp16(), 1.0), 0x3C00u);
  for (unsigned d = 1; d <= 21; ++d) {
    EXPECT_EQ(encode_value(PackFormat{32, d, Codec::e8my}, 1.0) << (d + 1), 0x3F800000u);
  }
  EXPECT_EQ(decode_value<double>(PackFormat::fp16(), 0x3C00), 1.0);
  EXPECT_EQ(decode_value<double>(PackFormat::e8m(14), 0), 0.0);
  EXPECT_EQ(encode_value(PackFormat::fp32_lossless(), 1.0), 0x3F800000u);
}

TEST(Codec, E8myMatchesBitOracle) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> mant(0.5, 1.0);
  std::uniform_int_distribution<int> expo(-140, 127);
  for (unsigned d = 1; d <= 22; ++d) {
    const PackFormat f{32, d, Codec::e8my};
    for (int k = 0; k < 20000; ++k) {
      const double v = (k & 1 ? -1 : 1) * std::ldexp(mant(gen), expo(gen));
      const std::uint32_t expect = e8my_bits(v, d);
      if ((expect & 0x7fffffffu) == 0x7f800000u) {
        EXPECT_THROW(encode_value(f, v), CodecError);
        continue;
      }
      const float got = decode_value<float>(f, encode_value(f, v));
      ASSERT_EQ(std::bit_cast<std::uint32_t>(got), expect) << "d=" << d << " v=" << v;
    }
  }
}

TEST(Codec, E8myErrorBoundAndMonotoneInY) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> mant(0.5, 1.0);
  std::uniform_int_distribution<int> expo(-100, 100);
  for (int k = 0; k < 100000; ++k) {
    const double v = std::ldexp(mant(gen), expo(gen));
    const double vf = static_cast<float>(v);
    double prev_err = INFINITY;
    for (unsigned y = 1; y <= 21; ++y) {
      const double q = quantize(PackFormat::e8m(y), v);
      const double err = std::fabs(q - vf);
      const double bound = std::ldexp(1.0, -static_cast<int>(y) - 1) / (1 - std::ldexp(1.0, -static_cast<int>(y) - 1));
      ASSERT_LE(err / std::fabs(vf), bound) << v << " y=" << y;
      ASSERT_LE(err, prev_err) << v << " y=" << y;
      prev_err = err;
    }
  }
}

TEST(Codec, E8m10RelativeErrorAgainstSource) {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> mant(0.5, 1.0);
  std::uniform_int_distribution<int> expo(-60, 60);
  const PackFormat f = PackFormat::e8m(10);
  for (int k = 0; k < 1000000; ++k) {
    const double v = std::ldexp(mant(gen), expo(gen));
    // 2^-11 from the mantissa rounding plus 2^-24 from the float step.
    ASSERT_LE(std::fabs(quantize(f, v) - v) / v, std::ldexp(1.0, -11) + std::ldexp(1.0, -23));
  }
}

TEST(Codec, ExactValuesStayExact) {
  for (double v : {0.0, 1.0, -2.0, 3.0, 0.5, 0.25, 1024.0, -7.0, 0.375}) {
    EXPECT_EQ(quantize(PackFormat::fp16(), v), v);
    EXPECT_EQ(quantize(PackFormat::e8m(10), v), v);
    EXPECT_EQ(quantize(PackFormat::e8m(3), v), v);
    EXPECT_EQ(quantize(PackFormat::fp32_lossless(), v), v);
  }
}

TEST(Codec, Monotone) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (const PackFormat& f : {PackFormat::fp16(), PackFormat::e8m(5), PackFormat::e8m(20)}) {
    for (int k = 0; k < 50000; ++k) {
      double a = u(gen), b = u(gen);
      if (a > b) std::swap(a, b);
      ASSERT_LE(quantize(f, a), quantize(f, b));
    }
  }
}

TEST(Codec, SubnormalsFlushAndOverflowThrows) {
  const PackFormat f = PackFormat::e8m(14);
  EXPECT_EQ(quantize(f, 1e-40), 0.0);
  EXPECT_TRUE(std::signbit(quantize(f, -1e-40)));
  EXPECT_THROW(encode_value(f, 3.5e38), CodecError);
  EXPECT_THROW(encode_value(f, 1e39), CodecError);
  EXPECT_THROW(encode_value(PackFormat::fp16(), 70000.0), CodecError);
  EXPECT_NO_THROW(encode_value(PackFormat::fp16(), 65504.0));
  EXPECT_THROW(encode_value(PackFormat::fp16(), std::nan("")), CodecError);
  EXPECT_THROW(encode_value(PackFormat::fp32_lossless(), INFINITY), CodecError);
  // FP16 keeps subnormal results.
  EXPECT_EQ(encode_value(PackFormat::fp16(), std::ldexp(1.0, -24)), 1u);
}

TEST(Codec, CarryIntoExponent) {
  const PackFormat f = PackFormat::e8m(3);
  EXPECT_EQ(quantize(f, 0.99999), 1.0);
  EXPECT_EQ(quantize(f, 1.9999), 2.0);
}

TEST(Codec, DeltaRangeChecks) {
  const PackFormat f = PackFormat::e8m(20);  // D = 2
  EXPECT_NO_THROW(pack_word(f, 1.0, 3));
  EXPECT_THROW(pack_word(f, 1.0, 4), FormatError);
  EXPECT_NO_THROW(pack_word(f, std::nullopt, 0x7fffffff));
  EXPECT_THROW(pack_word(f, std::nullopt, 0x80000000ull), FormatError);
}

TEST(Codec, UnpackIsTotalAndFlagMasksValue) {
  std::mt19937 gen(8);
  for (const PackFormat& f : {PackFormat::fp16(), PackFormat::e8m(1), PackFormat::e8m(21)}) {
    for (int k = 0; k < 100000; ++k) {
      const std::uint32_t w = gen();
      const auto e = unpack_word<float>(f, w);
      if ((w & 1) == 0) {
        ASSERT_EQ(e.delta, w >> 1);
        ASSERT_EQ(std::bit_cast<std::uint32_t>(e.value), 0u);
      } else {
        ASSERT_EQ(e.delta, (w >> 1) & ((1u << f.delta_bits) - 1));
      }
    }
  }
}

TEST(Codec, RoundTripSmallSweep) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (const PackFormat& f : {PackFormat::fp16(), PackFormat::e8m(20), PackFormat::e8m(10), PackFormat::fp32_lossless()}) {
    for (std::uint64_t d = 0; d <= std::min<std::uint64_t>(f.max_direct_delta(), 4096); ++d) {
      const double v = u(gen);
      const auto e = unpack_word<double>(f, pack_word(f, v, d));
      ASSERT_TRUE(e.has_value);
      ASSERT_EQ(e.delta, d);
      ASSERT_EQ(e.value, quantize(f, v));
      const auto g = unpack_word<double>(f, pack_word(f, std::nullopt, d + f.max_direct_delta() + 1));
      ASSERT_FALSE(g.has_value);
      ASSERT_EQ(g.delta, d + f.max_direct_delta() + 1);
    }
  }
}
