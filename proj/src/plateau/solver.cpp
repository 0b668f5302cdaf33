#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>

#include "kernels.hpp"
#include "wedge/dynamics.hpp"
#include "wedge/plateau.hpp"

namespace wedge::plateau {

namespace {

double max_norm(const std::vector<double>& v) {
  double n = 0;
  for (double x : v) n = std::max(n, std::abs(x));
  return n;
}

// analytic Jacobian of the expanded-form stencil residual; 9 entries per
// interior node, boundary columns dropped (Dirichlet data is fixed)
Eigen::SparseMatrix<double> jacobian(const SolverGrid& g) {
  const int nx = g.nx, ny = g.ny;
  const int un = nx - 2, um = ny - 2;
  const double a = 1.0 / (2.0 * g.hx), b = 1.0 / (2.0 * g.hy);
  const double c = 1.0 / (g.hx * g.hx), d = 1.0 / (g.hy * g.hy);
  const double e = 1.0 / (4.0 * g.hx * g.hy);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve((size_t)un * um * 9);
  auto idx = [&](int i, int j) { return (j - 1) * un + (i - 1); };

  for (int j = 1; j < ny - 1; ++j)
    for (int i = 1; i < nx - 1; ++i) {
      double zx = (g.at(i + 1, j) - g.at(i - 1, j)) * a;
      double zy = (g.at(i, j + 1) - g.at(i, j - 1)) * b;
      double zxx = (g.at(i + 1, j) - 2.0 * g.at(i, j) + g.at(i - 1, j)) * c;
      double zyy = (g.at(i, j + 1) - 2.0 * g.at(i, j) + g.at(i, j - 1)) * d;
      double zxy = (g.at(i + 1, j + 1) - g.at(i - 1, j + 1) -
                    g.at(i + 1, j - 1) + g.at(i - 1, j - 1)) *
                   e;
      double dRdzx = 2.0 * zx * zyy - 2.0 * zy * zxy;
      double dRdzy = 2.0 * zy * zxx - 2.0 * zx * zxy;
      double dRdxx = 1.0 + zy * zy;
      double dRdyy = 1.0 + zx * zx;
      double dRdxy = -2.0 * zx * zy;

      const int row = idx(i, j);
      auto put = [&](int ii, int jj, double v) {
        if (g.interior(ii, jj)) trip.emplace_back(row, idx(ii, jj), v);
      };
      put(i, j, dRdxx * (-2.0 * c) + dRdyy * (-2.0 * d));
      put(i + 1, j, dRdzx * a + dRdxx * c);
      put(i - 1, j, -dRdzx * a + dRdxx * c);
      put(i, j + 1, dRdzy * b + dRdyy * d);
      put(i, j - 1, -dRdzy * b + dRdyy * d);
      put(i + 1, j + 1, dRdxy * e);
      put(i - 1, j + 1, -dRdxy * e);
      put(i + 1, j - 1, -dRdxy * e);
      put(i - 1, j - 1, dRdxy * e);
    }

  Eigen::SparseMatrix<double> J(un * um, un * um);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

} // namespace

SolveReport solve(SolverGrid& g, double tol, int maxiter) {
  if (!(tol > 0)) throw std::invalid_argument("solve: tolerance must be > 0");
  auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;

  std::vector<double> F = residual(g);
  double norm = max_norm(F);
  rep.residual_history.push_back(norm);

  while (norm > tol && rep.iterations < maxiter) {
    Eigen::SparseMatrix<double> J = jacobian(g);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("solve: jacobian factorization failed");
    Eigen::VectorXd rhs(F.size());
    for (size_t k = 0; k < F.size(); ++k) rhs[(Eigen::Index)k] = -F[k];
    Eigen::VectorXd dz = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("solve: jacobian solve failed");

    // backtracking: halve the step until the max-norm strictly decreases
    const int un = g.nx - 2;
    std::vector<double> zsave = g.z;
    double lambda = 1.0;
    bool accepted = false;
    while (lambda > 1e-6) {
      g.z = zsave;
      for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i)
          g.at(i, j) += lambda * dz[(j - 1) * un + (i - 1)];
      std::vector<double> Ft = residual(g);
      double nt = max_norm(Ft);
      if (nt < norm) {
        F = std::move(Ft);
        norm = nt;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      g.z = zsave; // stalled: keep the best iterate, report non-convergence
      break;
    }
    rep.damping_history.push_back(lambda);
    rep.residual_history.push_back(norm);
    ++rep.iterations;
  }

  rep.residual_norm = norm;
  rep.converged = norm <= tol;
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

namespace {

// the surface equation for the third graph component, derived once from the
// Euclidean area Lagrangian and cached as an expression in the five jet
// variables; it equals -(expanded residual)/rho^3
const sym::Expr& derived_graph_equation() {
  namespace sy = wedge::sym;
  static const sym::Expr cached = [] {
    geo::Chart M = geo::base_chart(3);
    geo::SurfaceSystem el = geo::euler_lagrange_residual(
        geo::nambu_goto(M, geo::euclidean_metric(3)));
    std::map<sy::AtomKey, sy::Expr> graph;
    auto put = [&](const char* nm, std::vector<std::string> o, sy::Expr v) {
      graph[{true, nm, std::move(o)}] = std::move(v);
    };
    put("x_1", {"t"}, sy::num(1));
    put("x_1", {"s"}, sy::num(0));
    put("x_2", {"t"}, sy::num(0));
    put("x_2", {"s"}, sy::num(1));
    for (const char* nm : {"x_1", "x_2"}) {
      put(nm, {"t", "t"}, sy::num(0));
      put(nm, {"s", "t"}, sy::num(0));
      put(nm, {"s", "s"}, sy::num(0));
    }
    put("x_3", {"t"}, sy::var("zx"));
    put("x_3", {"s"}, sy::var("zy"));
    put("x_3", {"t", "t"}, sy::var("zxx"));
    put("x_3", {"s", "t"}, sy::var("zxy"));
    put("x_3", {"s", "s"}, sy::var("zyy"));
    return sy::subst(el.residuals[2], graph);
  }();
  return cached;
}

} // namespace

CrossCheckReport cross_check_with_symbolic(const SolverGrid& g) {
  namespace sy = wedge::sym;
  const sym::Expr& E3 = derived_graph_equation();
  std::vector<double> F = residual(g);
  const int nx = g.nx, ny = g.ny;
  const double a = 1.0 / (2.0 * g.hx), b = 1.0 / (2.0 * g.hy);
  const double c = 1.0 / (g.hx * g.hx), d = 1.0 / (g.hy * g.hy);
  const double e = 1.0 / (4.0 * g.hx * g.hy);

  CrossCheckReport rep;
  // one-cell margin: compare only where the jet stencil sits well inside
  for (int j = 2; j < ny - 2; ++j)
    for (int i = 2; i < nx - 2; ++i) {
      double zx = (g.at(i + 1, j) - g.at(i - 1, j)) * a;
      double zy = (g.at(i, j + 1) - g.at(i, j - 1)) * b;
      double zxx = (g.at(i + 1, j) - 2.0 * g.at(i, j) + g.at(i - 1, j)) * c;
      double zyy = (g.at(i, j + 1) - 2.0 * g.at(i, j) + g.at(i, j - 1)) * d;
      double zxy = (g.at(i + 1, j + 1) - g.at(i - 1, j + 1) -
                    g.at(i + 1, j - 1) + g.at(i - 1, j - 1)) *
                   e;
      sy::VarAssignment va;
      va.set("zx", zx);
      va.set("zy", zy);
      va.set("zxx", zxx);
      va.set("zxy", zxy);
      va.set("zyy", zyy);
      double rho2 = 1.0 + zx * zx + zy * zy;
      double from_symbolic =
          -sy::eval_double(E3, va) * rho2 * std::sqrt(rho2);
      double from_stencil = F[(size_t)(j - 1) * (nx - 2) + (i - 1)];
      // guard the denominator with the term scale of the expanded form so
      // cancellation on converged grids does not masquerade as disagreement
      double scale = (1.0 + zx * zx) * std::abs(zyy) +
                     std::abs(2.0 * zx * zy * zxy) +
                     (1.0 + zy * zy) * std::abs(zxx);
      double dev = std::abs(from_symbolic - from_stencil) /
                   std::max({1.0, scale, std::abs(from_stencil)});
      rep.max_rel_dev = std::max(rep.max_rel_dev, dev);
      rep.max_stencil_residual =
          std::max(rep.max_stencil_residual, std::abs(from_stencil));
      ++rep.nodes;
    }
  return rep;
}

} // namespace wedge::plateau
