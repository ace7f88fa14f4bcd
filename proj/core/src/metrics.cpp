#include "packsell/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "packsell/errors.hpp"
#include "packsell/parallel.hpp"

namespace packsell {

double backward_error(const CsrMatrix& a, std::span<const double> x, std::span<const double> y) {
  if (x.size() != a.cols() || y.size() != a.rows()) throw DimensionError("backward_error: dimension mismatch");
  const std::vector<double> ax = csr_spmv<double>(a, x);
  double num = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) num = std::max(num, std::fabs(y[i] - ax[i]));
  double xnorm = 0.0;
  for (double v : x) xnorm = std::max(xnorm, std::fabs(v));
  const double denom = norm_inf(a) * xnorm;
  if (denom == 0.0) throw Error("backward_error: ||A|| ||x|| is zero");
  return num / denom;
}

namespace {

template <class X>
constexpr Precision precision_of() {
  if constexpr (std::is_same_v<X, double>) return Precision::real64;
  else if constexpr (std::is_same_v<X, float>) return Precision::real32;
  else return Precision::real16;
}

}  // namespace

template <class X>
SpmvReport bench_spmv(const SpmvBackend& backend, const CsrMatrix& source, std::span<const X> x, std::size_t reps,
                      std::size_t warmup, std::vector<X>* y_out) {
  if (reps == 0) throw Error("bench_spmv: reps must be at least 1");
  std::vector<X> y(backend.rows());
  for (std::size_t r = 0; r < warmup; ++r) backend.apply(x, y);

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  for (std::size_t r = 0; r < reps; ++r) backend.apply(x, y);
  const auto stop = clock::now();
  const auto ns = std::max<std::int64_t>(1, std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());

  SpmvReport report;
  report.format_name = backend.name();
  report.precision = std::string(to_string(precision_of<X>()));
  report.nnz = backend.nnz();
  report.reps = reps;
  report.warmup = warmup;
  report.threads = num_threads();
  report.elapsed_per_call = static_cast<double>(ns) * 1e-9 / static_cast<double>(reps);
  report.gflops = 2.0 * static_cast<double>(backend.nnz()) / report.elapsed_per_call * 1e-9;
  report.bytes_touched_estimate = backend.storage_bytes() + (backend.cols() + backend.rows()) * sizeof(X);

  std::vector<double> xd(x.size()), yd(y.size());
  std::transform(x.begin(), x.end(), xd.begin(), [](X v) { return static_cast<double>(v); });
  std::transform(y.begin(), y.end(), yd.begin(), [](X v) { return static_cast<double>(v); });
  report.backward_error = backward_error(source, xd, yd);
  if (y_out) *y_out = std::move(y);
  return report;
}

template SpmvReport bench_spmv<double>(const SpmvBackend&, const CsrMatrix&, std::span<const double>, std::size_t,
                                       std::size_t, std::vector<double>*);
template SpmvReport bench_spmv<float>(const SpmvBackend&, const CsrMatrix&, std::span<const float>, std::size_t,
                                      std::size_t, std::vector<float>*);
template SpmvReport bench_spmv<Half>(const SpmvBackend&, const CsrMatrix&, std::span<const Half>, std::size_t,
                                     std::size_t, std::vector<Half>*);

}  // namespace packsell
