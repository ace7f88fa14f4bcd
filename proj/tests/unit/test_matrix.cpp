#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "packsell/errors.hpp"
#include "packsell/matrix.hpp"
#include "random_matrix.hpp"

using namespace packsell;
using namespace packsell::testing;

namespace {

CooMatrix parse(const std::string& text) {
  std::istringstream in(text);
  return load_matrix_market(in);
}

}  // namespace

TEST(MatrixMarket, General) {
  const CooMatrix c = parse("%%MatrixMarket matrix coordinate real general\n% comment\n2 2 2\n1 1 3.0\n2 2 4.0\n");
  EXPECT_EQ(c.n_rows, 2u);
  EXPECT_EQ(c.n_cols, 2u);
  ASSERT_EQ(c.entries.size(), 2u);
  EXPECT_EQ(c.entries[0], (CooEntry{0, 0, 3.0}));
  EXPECT_EQ(c.entries[1], (CooEntry{1, 1, 4.0}));
}

TEST(MatrixMarket, SymmetricExpansion) {
  const CooMatrix c = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 1.0\n2 1 5.0\n");
  ASSERT_EQ(c.entries.size(), 3u);
  EXPECT_EQ(c.entries[0], (CooEntry{0, 0, 1.0}));
  EXPECT_EQ(c.entries[1], (CooEntry{0, 1, 5.0}));
  EXPECT_EQ(c.entries[2], (CooEntry{1, 0, 5.0}));
}

TEST(MatrixMarket, DuplicatesAreSummed) {
  const CooMatrix c = parse("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 1.0\n1 1 2.0\n");
  ASSERT_EQ(c.entries.size(), 1u);
  EXPECT_EQ(c.entries[0], (CooEntry{0, 0, 3.0}));
}

TEST(MatrixMarket, IntegerFieldAndExplicitZeros) {
  const CooMatrix c = parse("%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 2 7\n2 1 0\n");
  ASSERT_EQ(c.entries.size(), 2u);
  EXPECT_EQ(c.entries[0].value, 7.0);
  EXPECT_EQ(c.entries[1].value, 0.0);
}

TEST(MatrixMarket, ErrorsCarryLineNumbers) {
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n"), ParseError);
  EXPECT_THROW(parse("%%MatrixMarket matrix array real general\n1 1\n1\n"), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  try {
    parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n3 1 1.0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
  try {
    parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 x\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n"), ParseError);
}

TEST(MatrixMarket, WriteReadRoundTrip) {
  const CsrMatrix a = random_matrix({40, 30, 0.2}, 1);
  std::stringstream ss;
  write_matrix_market(ss, a);
  EXPECT_EQ(to_csr(load_matrix_market(ss)), a);
}

TEST(Csr, Construction) {
  const CsrMatrix empty = to_csr(CooMatrix{3, 3, {}});
  EXPECT_EQ(std::vector<offset_t>(empty.row_ptr().begin(), empty.row_ptr().end()), (std::vector<offset_t>{0, 0, 0, 0}));

  const CsrMatrix eye = to_csr(CooMatrix{3, 3, {{0, 0, 1}, {1, 1, 1}, {2, 2, 1}}});
  EXPECT_EQ(std::vector<offset_t>(eye.row_ptr().begin(), eye.row_ptr().end()), (std::vector<offset_t>{0, 1, 2, 3}));
  EXPECT_EQ(std::vector<index_t>(eye.col_idx().begin(), eye.col_idx().end()), (std::vector<index_t>{0, 1, 2}));

  EXPECT_THROW(CsrMatrix(2, 2, {0, 1}, {0}, {1.0}), FormatError);
  EXPECT_THROW(CsrMatrix(2, 2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), FormatError);
  EXPECT_THROW(CsrMatrix(1, 2, {0, 1}, {2}, {1.0}), FormatError);
}

TEST(Csr, RowPointerFromRowCounts) {
  // Row counts 3,1,2,3,1,2 on a 6x6 matrix.
  const std::vector<std::vector<double>> rows = {
      {1, 1, 0, 1, 0, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 1, 0, 1, 0},
      {1, 0, 1, 0, 0, 1}, {0, 0, 0, 0, 1, 0}, {0, 0, 0, 1, 0, 1}};
  const CsrMatrix a = from_dense(rows, 6);
  std::vector<offset_t> expect{0};
  for (std::size_t n : {3, 1, 2, 3, 1, 2}) expect.push_back(expect.back() + n);
  EXPECT_EQ(std::vector<offset_t>(a.row_ptr().begin(), a.row_ptr().end()), expect);
}

TEST(Csr, CooRoundTripPreservesEntries) {
  const CsrMatrix a = random_matrix({50, 70, 0.1}, 3);
  const CooMatrix c = to_coo(a);
  EXPECT_TRUE(c.is_canonical());
  EXPECT_EQ(to_csr(c), a);
}

TEST(Csr, SpmvMatchesDenseOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CsrMatrix a = random_matrix({64, 64, 0.0, Pattern::banded, 10}, seed);
    const std::vector<double> x = random_vector(64, seed + 100);
    const std::vector<double> y = csr_spmv<double>(a, x);
    const std::vector<double> ref = dense_spmv(a, x);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-13 * std::max(1.0, std::fabs(ref[i])));
  }
  const CsrMatrix d = from_dense({{2, 0}, {0, 3}}, 2);
  EXPECT_EQ(csr_spmv<double>(d, std::vector<double>{1, 1}), (std::vector<double>{2, 3}));
  EXPECT_THROW(csr_spmv<double>(d, std::vector<double>{1, 1, 1}), DimensionError);
}

TEST(Csr, SpmvInFloatRoundsValuesFirst) {
  const CsrMatrix a = from_dense({{0.1, 0.2}}, 2);
  const std::vector<float> y = csr_spmv<float>(a, std::vector<float>{1.0f, 1.0f});
  EXPECT_EQ(y[0], 0.1f + 0.2f);
}

TEST(Scaling, RowSum) {
  const CsrMatrix a = from_dense({{3, -1}, {0, 2}}, 2);
  const CsrMatrix s = row_sum_scale(a);
  EXPECT_EQ(s.values()[0], 0.75);
  EXPECT_EQ(s.values()[1], -0.25);
  EXPECT_EQ(s.values()[2], 1.0);
  EXPECT_EQ(row_sum_scale(s), s);
  EXPECT_THROW(row_sum_scale(from_dense({{1, 0}, {0, 0}}, 2)), ScalingError);

  const CsrMatrix r = row_sum_scale(random_matrix({100, 80, 0.1}, 5));
  for (std::size_t i = 0; i < r.rows(); ++i) {
    double sum = 0;
    for (double v : r.row_values(i)) sum += std::fabs(v);
    if (r.row_nnz(i) > 0) EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(Scaling, SymmetricDiagonal) {
  EXPECT_EQ(sym_diag_scale(from_dense({{4, 0}, {0, 9}}, 2)), from_dense({{1, 0}, {0, 1}}, 2));
  const CsrMatrix s = sym_diag_scale(from_dense({{4, 2}, {2, 9}}, 2));
  EXPECT_EQ(s.values()[0], 1.0);
  EXPECT_DOUBLE_EQ(s.values()[1], 1.0 / 3.0);
  EXPECT_EQ(s.values()[1], s.values()[2]);
  EXPECT_TRUE(is_symmetric(s));
  try {
    sym_diag_scale(from_dense({{1, 1}, {1, 0}}, 2));
    FAIL();
  } catch (const ScalingError& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(Stats, RsdAndBandwidth) {
  std::vector<std::vector<double>> rows(30, std::vector<double>(30, 0.0));
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t k = 0; k < 9; ++k) rows[i][(i + k) % 30] = 1.0;
  }
  EXPECT_EQ(compute_stats(from_dense(rows, 30)).rsd, 0.0);

  const MatrixStats s = compute_stats(from_dense({{1, 0, 0}, {1, 1, 1}}, 3));
  EXPECT_DOUBLE_EQ(s.rsd, 0.5);
  EXPECT_EQ(s.nnz_per_row_min, 1.0);
  EXPECT_EQ(s.nnz_per_row_max, 3.0);

  std::vector<std::vector<double>> tri(5, std::vector<double>(5, 0.0));
  for (std::size_t i = 0; i < 5; ++i) {
    tri[i][i] = 2;
    if (i > 0) tri[i][i - 1] = -1;
    if (i + 1 < 5) tri[i][i + 1] = -1;
  }
  const MatrixStats t = compute_stats(from_dense(tri, 5));
  EXPECT_EQ(t.lower_bandwidth, 1u);
  EXPECT_EQ(t.upper_bandwidth, 1u);

  const MatrixStats e = compute_stats(to_csr(CooMatrix{4, 4, {}}));
  EXPECT_EQ(e.rsd, 0.0);
  EXPECT_EQ(e.nnz, 0u);
}

TEST(Stats, LowerBandwidthMatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CsrMatrix a = random_matrix({120, 90, 0.05, seed % 2 ? Pattern::banded : Pattern::scattered, 6, -1, 1, 0.1}, seed);
    EXPECT_EQ(lower_bandwidth(a), brute_lower_bandwidth(a));
    EXPECT_EQ(compute_stats(a).lower_bandwidth, brute_lower_bandwidth(a));
  }
}

TEST(Stats, NormAndDiagonal) {
  const CsrMatrix a = from_dense({{1, -2}, {0, 3}}, 2);
  EXPECT_EQ(norm_inf(a), 3.0);
  EXPECT_EQ(diagonal(a), (std::vector<double>{1, 3}));
  EXPECT_FALSE(is_symmetric(a));
}
