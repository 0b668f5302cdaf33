#pragma once
// Numerical Plateau solver for graph surfaces z(x, y) over a rectangle with
// Dirichlet data: damped Newton on the expanded minimal-surface residual
//   (1 + z_x^2) z_yy - 2 z_x z_y z_xy + (1 + z_y^2) z_xx
// discretized with second-order central stencils.  The residual kernels come
// in a scalar reference flavor and an AVX2 flavor picked at runtime; both are
// compiled without fp contraction so their outputs are bitwise identical.
#include <functional>
#include <string>
#include <vector>

namespace wedge::plateau {

// rectangular grid, node (i, j) at (x0 + i hx, y0 + j hy), row-major in i;
// the outermost ring holds the Dirichlet samples, the rest are unknowns
struct SolverGrid {
  int nx = 0, ny = 0; // point counts per axis, boundary included (>= 3)
  double x0 = 0, y0 = 0;
  double hx = 0, hy = 0;
  std::vector<double> z; // nx * ny values

  double& at(int i, int j) { return z[(size_t)j * nx + i]; }
  double at(int i, int j) const { return z[(size_t)j * nx + i]; }
  double x(int i) const { return x0 + i * hx; }
  double y(int j) const { return y0 + j * hy; }
  bool interior(int i, int j) const {
    return i > 0 && i < nx - 1 && j > 0 && j < ny - 1;
  }
};

// samples `boundary` on the edge ring; throws std::invalid_argument for
// point counts < 3 or non-finite boundary values.  Interior starts at the
// transfinite interpolant of the ring.
SolverGrid make_grid(double x0, double x1, double y0, double y1, int nx,
                     int ny,
                     const std::function<double(double, double)>& boundary);
// (re)fill the interior with the transfinite (Coons) interpolant of the ring
void transfinite_init(SolverGrid& g);

// expanded-form residual on the interior nodes, (nx-2)*(ny-2) values,
// row-major in i
std::vector<double> residual(const SolverGrid& g);

// name of the kernel flavor the dispatcher would use right now
const char* kernel_name();
// pin the scalar reference kernels (equivalence tests); false restores the
// runtime choice
void force_scalar_kernels(bool on);

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double residual_norm = 0; // final interior max-norm
  std::vector<double> residual_history; // max-norm after each accepted step
  std::vector<double> damping_history;  // accepted step fractions
  double wall_seconds = 0;
};

// damped Newton with an analytic sparse Jacobian (9-point stencil) and
// backtracking that never accepts a residual increase; throws
// std::runtime_error when the linear solve fails
SolveReport solve(SolverGrid& g, double tol = 1e-10, int maxiter = 50);

// dual-pipeline comparison: the surface equation derived symbolically from
// the Euclidean area Lagrangian, evaluated on jets reconstructed from the
// grid by the same stencils, against the stencil residual.  The divergence
// and expanded forms differ by the factor -rho^3; this op owns that factor.
struct CrossCheckReport {
  int nodes = 0;
  double max_rel_dev = 0;
  double max_stencil_residual = 0; // largest |expanded residual| seen
  double tolerance = 1e-8;
  bool pass() const { return max_rel_dev <= tolerance; }
};
CrossCheckReport cross_check_with_symbolic(const SolverGrid& g);

// artifact emission: CSV rows "x,y,z" (row-major) and a small gnuplot script
// that renders the CSV
void write_csv(const SolverGrid& g, const std::string& path);
void write_gnuplot(const std::string& csv_path, const std::string& gp_path);

} // namespace wedge::plateau
