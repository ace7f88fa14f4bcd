#include "packsell/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace packsell {
namespace {

int default_threads() noexcept {
  if (const char* env = std::getenv("PACKSELL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::atomic<int> configured{0};

}  // namespace

int num_threads() noexcept {
  const int t = configured.load(std::memory_order_relaxed);
  return t > 0 ? t : default_threads();
}

void set_num_threads(int threads) noexcept {
  configured.store(threads > 0 ? threads : 0, std::memory_order_relaxed);
}

}  // namespace packsell
