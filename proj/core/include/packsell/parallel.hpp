#pragma once

namespace packsell {

/// Threads used by the SpMV kernels. Defaults to PACKSELL_THREADS when set,
/// otherwise the hardware parallelism.
int num_threads() noexcept;

/// Values < 1 restore the default.
void set_num_threads(int threads) noexcept;

}  // namespace packsell
