#include <atomic>

#include "kernels.hpp"
#include "wedge/plateau.hpp"

namespace wedge::plateau {

namespace detail {

namespace {
std::atomic<bool> g_force_scalar{false};

bool cpu_has_avx2() {
#if defined(WEDGE_HAVE_AVX2) && defined(__GNUC__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}
} // namespace

Kernels active_kernels() {
  if (g_force_scalar.load(std::memory_order_relaxed)) return scalar_kernels();
#ifdef WEDGE_HAVE_AVX2
  if (cpu_has_avx2()) return avx2_kernels();
#endif
  return scalar_kernels();
}

} // namespace detail

const char* kernel_name() { return detail::active_kernels().name; }

void force_scalar_kernels(bool on) {
  detail::g_force_scalar.store(on, std::memory_order_relaxed);
}

} // namespace wedge::plateau
