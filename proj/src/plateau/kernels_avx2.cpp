#include "kernels.hpp"

#include <immintrin.h>

namespace wedge::plateau::detail {

namespace {

// four nodes at a time; the lane arithmetic mirrors ms_residual_node
// operation for operation, the remainder falls back to the shared scalar node
void residual_row_avx2(const double* zm, const double* z0, const double* zp,
                       int nx, const StencilScales& s, double* out) {
  const int n = nx - 2; // interior nodes in this row
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d c2hx = _mm256_set1_pd(s.inv2hx);
  const __m256d c2hy = _mm256_set1_pd(s.inv2hy);
  const __m256d chx2 = _mm256_set1_pd(s.invhx2);
  const __m256d chy2 = _mm256_set1_pd(s.invhy2);
  const __m256d c4 = _mm256_set1_pd(s.inv4hxhy);

  int i = 1;
  for (; i + 3 <= n; i += 4) {
    __m256d z0l = _mm256_loadu_pd(z0 + i - 1);
    __m256d z0c = _mm256_loadu_pd(z0 + i);
    __m256d z0r = _mm256_loadu_pd(z0 + i + 1);
    __m256d zml = _mm256_loadu_pd(zm + i - 1);
    __m256d zmc = _mm256_loadu_pd(zm + i);
    __m256d zmr = _mm256_loadu_pd(zm + i + 1);
    __m256d zpl = _mm256_loadu_pd(zp + i - 1);
    __m256d zpc = _mm256_loadu_pd(zp + i);
    __m256d zpr = _mm256_loadu_pd(zp + i + 1);

    __m256d zx = _mm256_mul_pd(_mm256_sub_pd(z0r, z0l), c2hx);
    __m256d zy = _mm256_mul_pd(_mm256_sub_pd(zpc, zmc), c2hy);
    __m256d zxx = _mm256_mul_pd(
        _mm256_add_pd(_mm256_sub_pd(z0r, _mm256_mul_pd(two, z0c)), z0l), chx2);
    __m256d zyy = _mm256_mul_pd(
        _mm256_add_pd(_mm256_sub_pd(zpc, _mm256_mul_pd(two, z0c)), zmc), chy2);
    __m256d zxy = _mm256_mul_pd(
        _mm256_add_pd(_mm256_sub_pd(_mm256_sub_pd(zpr, zpl), zmr), zml), c4);

    __m256d t1 =
        _mm256_mul_pd(_mm256_add_pd(one, _mm256_mul_pd(zx, zx)), zyy);
    __m256d t2 = _mm256_mul_pd(
        _mm256_mul_pd(_mm256_mul_pd(two, zx), zy), zxy);
    __m256d t3 =
        _mm256_mul_pd(_mm256_add_pd(one, _mm256_mul_pd(zy, zy)), zxx);
    _mm256_storeu_pd(out + i - 1, _mm256_add_pd(_mm256_sub_pd(t1, t2), t3));
  }
  for (; i <= n; ++i) out[i - 1] = ms_residual_node(zm, z0, zp, i, s);
}

} // namespace

Kernels avx2_kernels() { return {residual_row_avx2, "avx2"}; }

} // namespace wedge::plateau::detail
