#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library code it checks.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "packsell/matrix.hpp"

namespace packsell::testing {

// ---- binary16 ----------------------------------------------------------

/// Every finite non-negative binary16 value, indexed by bit pattern
/// 0x0000..0x7bff, built from the textbook definition.
inline const std::vector<double>& half_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(0x7c00);
    for (std::uint32_t b = 0; b < 0x7c00; ++b) {
      const std::uint32_t e = b >> 10;
      const std::uint32_t m = b & 0x3ff;
      t[b] = e == 0 ? std::ldexp(static_cast<double>(m), -24) : std::ldexp(1.0 + m / 1024.0, static_cast<int>(e) - 15);
    }
    return t;
  }();
  return table;
}

/// Nearest binary16 by table search, ties to the even pattern. Magnitudes
/// at or beyond 65504 + half an ulp (65520) round to infinity.
inline std::uint16_t nearest_half_bits(double v) {
  if (std::isnan(v)) return 0x7e00;
  const std::uint16_t sign = std::signbit(v) ? 0x8000 : 0;
  const double a = std::fabs(v);
  if (a >= 65520.0) return sign | 0x7c00;
  const auto& t = half_table();
  const auto it = std::lower_bound(t.begin(), t.end(), a);
  std::uint32_t hi = static_cast<std::uint32_t>(it - t.begin());
  if (hi >= t.size()) return sign | 0x7bff;
  if (t[hi] == a || hi == 0) return sign | static_cast<std::uint16_t>(hi);
  const std::uint32_t lo = hi - 1;
  const double dlo = a - t[lo];
  const double dhi = t[hi] - a;
  std::uint32_t pick = dlo < dhi ? lo : (dhi < dlo ? hi : ((lo & 1) == 0 ? lo : hi));
  return sign | static_cast<std::uint16_t>(pick);
}

// ---- E8MY --------------------------------------------------------------

/// E8MY by integer manipulation of the binary32 pattern: flush subnormals,
/// add half of the dropped range to the magnitude (ties away from zero,
/// carries propagate into the exponent) and clear the low D+1 bits.
/// Returns the binary32 pattern; overflow yields the infinity pattern.
inline std::uint32_t e8my_bits(double v, unsigned delta_bits) {
  const float f = static_cast<float>(v);
  std::uint32_t b = std::bit_cast<std::uint32_t>(f);
  const std::uint32_t sign = b & 0x80000000u;
  std::uint32_t mag = b & 0x7fffffffu;
  if (mag < 0x00800000u) return sign;
  const unsigned drop = delta_bits + 1;
  mag += std::uint32_t{1} << (drop - 1);
  mag &= ~((std::uint32_t{1} << drop) - 1);
  if (mag >= 0x7f800000u) mag = 0x7f800000u;
  return sign | mag;
}

// ---- word assembly -----------------------------------------------------

/// [value : V][delta : D][flag : 1] by explicit field placement.
inline std::uint64_t assemble_word(unsigned word_bits, unsigned delta_bits, bool flag, std::uint64_t delta,
                                   std::uint64_t value_pattern) {
  std::uint64_t w = flag ? 1 : 0;
  w |= delta << 1;
  if (flag) w |= value_pattern << (delta_bits + 1);
  if (word_bits == 32) w &= 0xffffffffull;
  return w;
}

// ---- PackSELL structure --------------------------------------------------

/// max over rows of (i - leftmost column), from the CSR arrays.
inline std::size_t brute_lower_bandwidth(const CsrMatrix& a) {
  std::size_t k = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_cols(i);
    if (!cols.empty() && cols[0] < i) k = std::max<std::size_t>(k, i - cols[0]);
  }
  return k;
}

/// Number of flag-0 words a row needs: first gap from the block offset,
/// then consecutive gaps; each gap >= 2^D costs ceil(gap / (2^(W-1)-1))
/// dummies.
inline std::size_t brute_dummy_count(const CsrMatrix& a, std::size_t sigma, unsigned word_bits, unsigned delta_bits) {
  const std::size_t k_left = brute_lower_bandwidth(a);
  const std::uint64_t limit = std::uint64_t{1} << delta_bits;
  const std::uint64_t chunk = (std::uint64_t{1} << (word_bits - 1)) - 1;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const std::size_t block = (i / sigma) * sigma;
    std::uint64_t prev = k_left < block ? block - k_left : 0;
    for (index_t c : a.row_cols(i)) {
      const std::uint64_t gap = c - prev;
      if (gap >= limit) count += static_cast<std::size_t>((gap + chunk - 1) / chunk);
      prev = c;
    }
  }
  return count;
}

// ---- dense oracle --------------------------------------------------------

inline std::vector<double> dense_spmv(const CsrMatrix& a, const std::vector<double>& x) {
  std::vector<std::vector<double>> d(a.rows(), std::vector<double>(a.cols(), 0.0));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.row_nnz(i); ++k) d[i][a.row_cols(i)[k]] = a.row_values(i)[k];
  }
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    long double s = 0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += static_cast<long double>(d[i][j]) * x[j];
    y[i] = static_cast<double>(s);
  }
  return y;
}

/// Solves a small dense SPD system with Gaussian elimination and partial
/// pivoting.
inline std::vector<double> dense_solve(const CsrMatrix& a, std::vector<double> b) {
  const std::size_t n = a.rows();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < a.row_nnz(i); ++k) m[i][a.row_cols(i)[k]] = a.row_values(i)[k];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(m[r][c]) > std::fabs(m[p][c])) p = r;
    }
    std::swap(m[c], m[p]);
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r][c] / m[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= m[i][k] * x[k];
    x[i] = s / m[i][i];
  }
  return x;
}

}  // namespace packsell::testing
