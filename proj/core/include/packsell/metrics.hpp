#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "packsell/backend.hpp"
#include "packsell/matrix.hpp"

namespace packsell {

/// ||y - A x||_inf / (||A||_inf ||x||_inf), with A x evaluated in double.
/// Throws DimensionError on mismatched lengths and Error when the
/// denominator is zero.
double backward_error(const CsrMatrix& a, std::span<const double> x, std::span<const double> y);

inline constexpr std::size_t kDefaultReps = 10000;
inline constexpr std::size_t kDefaultWarmup = 100;

struct SpmvReport {
  std::string format_name;
  std::string precision;
  std::size_t nnz = 0;
  std::size_t reps = 0;
  std::size_t warmup = 0;
  int threads = 1;
  double elapsed_per_call = 0.0;  // seconds
  /// 2 * nnz / time; padding and dummy elements do not count.
  double gflops = 0.0;
  double backward_error = 0.0;
  /// Format arrays + one read of x + one write of y.
  std::size_t bytes_touched_estimate = 0;
};

/// Runs `warmup` untimed calls and `reps` timed calls of the backend in the
/// precision of X. The backward error of the final y is measured against
/// `source`, the unquantised matrix. Throws Error when reps == 0.
template <class X>
SpmvReport bench_spmv(const SpmvBackend& backend, const CsrMatrix& source, std::span<const X> x,
                      std::size_t reps = kDefaultReps, std::size_t warmup = kDefaultWarmup,
                      std::vector<X>* y_out = nullptr);

}  // namespace packsell
