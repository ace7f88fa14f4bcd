#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "packsell/backend.hpp"
#include "packsell/matrix.hpp"
#include "packsell/stencil.hpp"

namespace {

const packsell::CsrMatrix& poisson() {
  static const packsell::CsrMatrix a = packsell::sym_diag_scale(packsell::poisson3d(64, 64, 64));
  return a;
}

template <class X>
void BM_Spmv(benchmark::State& state, const std::string& format) {
  const packsell::CsrMatrix& a = poisson();
  const std::unique_ptr<packsell::SpmvBackend> backend = packsell::make_backend(format, a);
  std::vector<X> x(a.cols(), X(1.0)), y(a.rows());
  for (auto _ : state) {
    backend->apply(std::span<const X>(x), std::span<X>(y));
    benchmark::DoNotOptimize(y.data());
    benchmark::ClobberMemory();
  }
  state.counters["GFLOPS"] =
      benchmark::Counter(2.0 * static_cast<double>(a.nnz()), benchmark::Counter::kIsIterationInvariantRate,
                         benchmark::Counter::kIs1000);
  state.counters["bytes"] = static_cast<double>(backend->storage_bytes());
}

void BM_SpmvF64(benchmark::State& state, const std::string& format) { BM_Spmv<double>(state, format); }
void BM_SpmvF32(benchmark::State& state, const std::string& format) { BM_Spmv<float>(state, format); }

}  // namespace

BENCHMARK_CAPTURE(BM_SpmvF64, csr64, std::string("csr64"));
BENCHMARK_CAPTURE(BM_SpmvF32, csr32, std::string("csr32"));
BENCHMARK_CAPTURE(BM_SpmvF64, sell64, std::string("sell64"));
BENCHMARK_CAPTURE(BM_SpmvF32, sell32, std::string("sell32"));
BENCHMARK_CAPTURE(BM_SpmvF32, packsell_e8m14, std::string("packsell-e8m14"));
BENCHMARK_CAPTURE(BM_SpmvF32, packsell_e8m20, std::string("packsell-e8m20"));
BENCHMARK_CAPTURE(BM_SpmvF32, packsell_fp16_f32, std::string("packsell-fp16"));
BENCHMARK_CAPTURE(BM_SpmvF64, packsell_fp32, std::string("packsell-fp32"));

BENCHMARK_MAIN();
