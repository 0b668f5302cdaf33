#pragma once
// Internal kernel interface.  A kernel fills one interior row of the
// expanded-form residual from three consecutive grid rows.  Every flavor
// must perform the exact arithmetic of ms_residual_node below (same
// operations, same association) so that, compiled without fp contraction,
// scalar and vector results are bitwise identical.

namespace wedge::plateau::detail {

struct StencilScales {
  double inv2hx, inv2hy;   // 1/(2 hx), 1/(2 hy)
  double invhx2, invhy2;   // 1/hx^2, 1/hy^2
  double inv4hxhy;         // 1/(4 hx hy)
};

inline double ms_residual_node(const double* zm, const double* z0,
                               const double* zp, int i,
                               const StencilScales& s) {
  double zx = (z0[i + 1] - z0[i - 1]) * s.inv2hx;
  double zy = (zp[i] - zm[i]) * s.inv2hy;
  double zxx = (z0[i + 1] - 2.0 * z0[i] + z0[i - 1]) * s.invhx2;
  double zyy = (zp[i] - 2.0 * z0[i] + zm[i]) * s.invhy2;
  double zxy = (zp[i + 1] - zp[i - 1] - zm[i + 1] + zm[i - 1]) * s.inv4hxhy;
  return (1.0 + zx * zx) * zyy - 2.0 * zx * zy * zxy +
         (1.0 + zy * zy) * zxx;
}

// zm/z0/zp point at rows j-1, j, j+1; writes out[0 .. nx-3] for i in [1, nx-2]
using ResidualRowFn = void (*)(const double* zm, const double* z0,
                               const double* zp, int nx,
                               const StencilScales& s, double* out);

struct Kernels {
  ResidualRowFn residual_row;
  const char* name;
};

Kernels scalar_kernels();
#ifdef WEDGE_HAVE_AVX2
Kernels avx2_kernels();
#endif
// runtime pick (cpu feature check + the force_scalar override)
Kernels active_kernels();

} // namespace wedge::plateau::detail
