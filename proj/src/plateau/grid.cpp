#include <cmath>
#include <fstream>
#include <stdexcept>

#include "kernels.hpp"
#include "wedge/plateau.hpp"

namespace wedge::plateau {

SolverGrid make_grid(double x0, double x1, double y0, double y1, int nx,
                     int ny,
                     const std::function<double(double, double)>& boundary) {
  if (nx < 3 || ny < 3)
    throw std::invalid_argument("make_grid: need at least 3 points per axis");
  if (!(x1 > x0) || !(y1 > y0))
    throw std::invalid_argument("make_grid: empty domain");
  SolverGrid g;
  g.nx = nx;
  g.ny = ny;
  g.x0 = x0;
  g.y0 = y0;
  g.hx = (x1 - x0) / (nx - 1);
  g.hy = (y1 - y0) / (ny - 1);
  g.z.assign((size_t)nx * ny, 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (g.interior(i, j)) continue;
      double v = boundary(g.x(i), g.y(j));
      if (!std::isfinite(v))
        throw std::invalid_argument("make_grid: boundary value is not finite");
      g.at(i, j) = v;
    }
  transfinite_init(g);
  return g;
}

void transfinite_init(SolverGrid& g) {
  const int nx = g.nx, ny = g.ny;
  for (int j = 1; j < ny - 1; ++j) {
    double v = double(j) / (ny - 1);
    for (int i = 1; i < nx - 1; ++i) {
      double u = double(i) / (nx - 1);
      double edges = (1 - u) * g.at(0, j) + u * g.at(nx - 1, j) +
                     (1 - v) * g.at(i, 0) + v * g.at(i, ny - 1);
      double corners = (1 - u) * (1 - v) * g.at(0, 0) +
                       u * (1 - v) * g.at(nx - 1, 0) +
                       (1 - u) * v * g.at(0, ny - 1) +
                       u * v * g.at(nx - 1, ny - 1);
      g.at(i, j) = edges - corners;
    }
  }
}

std::vector<double> residual(const SolverGrid& g) {
  const int nx = g.nx, ny = g.ny;
  detail::StencilScales s{1.0 / (2.0 * g.hx), 1.0 / (2.0 * g.hy),
                          1.0 / (g.hx * g.hx), 1.0 / (g.hy * g.hy),
                          1.0 / (4.0 * g.hx * g.hy)};
  detail::Kernels k = detail::active_kernels();
  std::vector<double> out((size_t)(nx - 2) * (ny - 2));
  for (int j = 1; j < ny - 1; ++j)
    k.residual_row(g.z.data() + (size_t)(j - 1) * nx,
                   g.z.data() + (size_t)j * nx,
                   g.z.data() + (size_t)(j + 1) * nx, nx, s,
                   out.data() + (size_t)(j - 1) * (nx - 2));
  return out;
}

void write_csv(const SolverGrid& g, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_csv: cannot open " + path);
  f << "x,y,z\n";
  f.precision(17);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f << g.x(i) << ',' << g.y(j) << ',' << g.at(i, j) << '\n';
  if (!f) throw std::runtime_error("write_csv: write failed for " + path);
}

void write_gnuplot(const std::string& csv_path, const std::string& gp_path) {
  std::ofstream f(gp_path);
  if (!f) throw std::runtime_error("write_gnuplot: cannot open " + gp_path);
  f << "set datafile separator ','\n"
    << "set dgrid3d\n"
    << "set hidden3d\n"
    << "set xlabel 'x'\nset ylabel 'y'\nset zlabel 'z'\n"
    << "splot '" << csv_path << "' every ::1 using 1:2:3 with lines notitle\n"
    << "pause -1\n";
}

} // namespace wedge::plateau
