#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <random>
#include <set>
#include <type_traits>
#include <vector>

#include "packsell/matrix.hpp"

namespace packsell::testing {

enum class Pattern { scattered, banded };

struct RandomSpec {
  std::size_t rows = 64;
  std::size_t cols = 64;
  double density = 0.05;
  Pattern pattern = Pattern::scattered;
  /// Band half-width for banded matrices.
  std::size_t band = 8;
  double value_lo = -1.0;
  double value_hi = 1.0;
  /// Fraction of rows forced empty.
  double empty_rows = 0.0;
};

/// Reproducible random sparse matrix. Banded matrices draw columns within
/// `band` of the scaled diagonal position.
inline CsrMatrix random_matrix(const RandomSpec& spec, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> value(spec.value_lo, spec.value_hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CooMatrix coo;
  coo.n_rows = spec.rows;
  coo.n_cols = spec.cols;
  for (std::size_t i = 0; i < spec.rows; ++i) {
    if (spec.cols == 0 || unit(gen) < spec.empty_rows) continue;
    std::size_t lo = 0, hi = spec.cols;
    if (spec.pattern == Pattern::banded) {
      const std::size_t centre = spec.rows > 1 ? i * (spec.cols - 1) / (spec.rows - 1) : 0;
      lo = centre > spec.band ? centre - spec.band : 0;
      hi = std::min(spec.cols, centre + spec.band + 1);
    }
    const std::size_t width = hi - lo;
    std::size_t count = static_cast<std::size_t>(spec.density * static_cast<double>(spec.cols) + unit(gen));
    if (spec.pattern == Pattern::banded) count = static_cast<std::size_t>(unit(gen) * static_cast<double>(width + 1));
    count = std::min(count, width);
    std::set<std::size_t> picked;
    std::uniform_int_distribution<std::size_t> col(lo, hi - 1);
    while (picked.size() < count) picked.insert(col(gen));
    for (std::size_t c : picked) {
      double v = value(gen);
      if (v == 0.0) v = 0.5;
      coo.entries.push_back({static_cast<index_t>(i), static_cast<index_t>(c), v});
    }
  }
  return to_csr(std::move(coo));
}

inline std::vector<double> random_vector(std::size_t n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

/// CSR from dense rows; zeros are skipped.
inline CsrMatrix from_dense(const std::vector<std::vector<double>>& rows, std::size_t n_cols) {
  CooMatrix coo;
  coo.n_rows = rows.size();
  coo.n_cols = n_cols;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] != 0.0) coo.entries.push_back({static_cast<index_t>(i), static_cast<index_t>(j), rows[i][j]});
    }
  }
  return to_csr(std::move(coo));
}

template <std::size_t N>
using bits_of_size = std::conditional_t<N == 8, std::uint64_t, std::conditional_t<N == 4, std::uint32_t, std::uint16_t>>;

/// Bitwise comparison of two vectors of floating values.
template <class T>
bool bitwise_equal(const std::vector<T>& a, const std::vector<T>& b) {
  using B = bits_of_size<sizeof(T)>;
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<B>(a[i]) != std::bit_cast<B>(b[i])) return false;
  }
  return true;
}

}  // namespace packsell::testing
