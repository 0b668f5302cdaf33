#include "kernels.hpp"

namespace wedge::plateau::detail {

namespace {

void residual_row_scalar(const double* zm, const double* z0, const double* zp,
                         int nx, const StencilScales& s, double* out) {
  for (int i = 1; i <= nx - 2; ++i)
    out[i - 1] = ms_residual_node(zm, z0, zp, i, s);
}

} // namespace

Kernels scalar_kernels() { return {residual_row_scalar, "scalar"}; }

} // namespace wedge::plateau::detail
