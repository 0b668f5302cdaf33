#pragma once
// Phase dynamics of surfaces: Lagrangians on /\2 T M, Hamiltonians (and Morse
// families) on /\2 T* M, the implicit dynamics D they generate inside
// /\2 T /\2 T* M, Legendre maps, and the Euler-Lagrange / Hamilton systems
// written for an unknown surface (t, s) -> x(t, s).
//
// The residual sets are not transcribed: they are read off the generated
// lagrangian submanifolds through alpha_n / beta_n, so every sign is forced
// by the verified pullback identities of the triple.
#include <string>
#include <vector>
#include "wedge/triple.hpp"

namespace wedge::geo {

using Metric = std::vector<std::vector<sym::Expr>>; // symmetric, base-sized

struct Lagrangian {
  Chart base;    // plain manifold chart
  Chart domain;  // /\2 T base
  sym::Expr L;   // function of the domain coordinates
  Metric metric; // optional; empty when the Lagrangian is not metric-induced
};

struct Hamiltonian {
  Chart base;
  Chart domain; // /\2 T* base
  sym::Expr H;  // may involve declared parameters (Morse family)
  std::vector<std::string> parameters; // stationarity variables; empty = plain
};

// implicit dynamics D as a residual set on /\2 T /\2 T* M; a phase point is
// in D exactly when every residual vanishes
struct PhaseDynamics {
  Chart phase;
  std::vector<sym::Expr> base_residuals;     // one per base coordinate
  std::vector<sym::Expr> momentum_residuals; // one per increasing pair
  std::vector<sym::Expr> constraints; // Morse-family stationarity conditions
  std::vector<sym::Expr> all() const;
};

// the Euler-Lagrange / Hamilton equations written on an unknown surface
// (t, s) -> (x^mu(t, s)); unknowns are dependent atoms, derivatives appear
// as formal derivative leaves D(x_mu;t), D(p_12;s,t), ...
struct SurfaceSystem {
  std::vector<std::string> unknowns;    // component names carrying (t, s)
  std::vector<sym::Expr> residuals;     // one per base coordinate
  std::vector<sym::Expr> pair_residuals; // Hamilton only: dH/dp - bracket
};

// validated constructors; throw std::invalid_argument when the generating
// function references atoms outside its chart (plus declared parameters)
Lagrangian make_lagrangian(const Chart& base, const sym::Expr& L,
                           Metric metric = {});
Hamiltonian make_hamiltonian(const Chart& base, const sym::Expr& H);
Hamiltonian make_morse_family(const Chart& base, const sym::Expr& F,
                              std::vector<std::string> parameters);

// ---- metric helpers -------------------------------------------------------
Metric euclidean_metric(int m);
Metric minkowski_metric(int m); // diag(-1, 1, ..., 1)
Metric inverse_metric(const Metric& g); // adjugate over determinant, exact
// scalar product induced on bivector fibers, one row/column per increasing
// pair in chart order: G_{IJ} = g_{ac} g_{bd} - g_{ad} g_{bc} for
// I = (a < b), J = (c < d); (w|u) = sum_{IJ} G_{IJ} w^I u^J.  Gram-determinant
// normalization, (u ^ v | u ^ v) = |u|^2 |v|^2 - (u.v)^2, so the cometric is
// the exact matrix inverse and the Legendre image of the area Lagrangian
// lies on the unit sphere of the dual product.
Metric bivector_metric(const Chart& base, const Metric& g);
// the same product on the dual fibers, built from the inverse metric
Metric bivector_cometric(const Chart& base, const Metric& g);

// ---- generating function builders ----------------------------------------
// area of a bivector: L = sqrt((w|w)_g)
Lagrangian nambu_goto(const Chart& base, const Metric& g);
// L = 1/2 sum Q_{IJ} xd^I xd^J - V(x); default Q is the identity
Lagrangian quadratic_lagrangian(const Chart& base,
                                const Metric& Q = {},
                                const sym::Expr& potential = {});
// Morse family F(p, r) = r (sqrt((p|p)_g) - 1) with one parameter r
Hamiltonian nambu_goto_family(const Chart& base, const Metric& g);

// ---- phase dynamics --------------------------------------------------------
PhaseDynamics lagrange_phase(const Lagrangian& L);
PhaseDynamics hamilton_phase(const Hamiltonian& H); // plain Hamiltonian only
// Hamilton residuals of the family plus its stationarity conditions; throws
// std::runtime_error("stationarity eliminates nothing") when the family does
// not actually depend on its parameters
PhaseDynamics morse_family_phase(const Hamiltonian& F);

// (x^mu, xd^{nu sigma}) |-> (x^mu, -dL/dxd^{nu sigma})
CoordMap legendre_map(const Lagrangian& L);

// ---- surface equations -----------------------------------------------------
// substitutes xd^{mu nu} = x^mu_t x^nu_s - x^mu_s x^nu_t and emits
//   dL/dx^sigma - sum_mu [ x^mu_t d/ds(dL/dxd^{mu sigma})
//                        - x^mu_s d/dt(dL/dxd^{mu sigma}) ]
SurfaceSystem euler_lagrange_residual(const Lagrangian& L);
// pair family dH/dp_{mu nu} - (x^mu_t x^nu_s - x^mu_s x^nu_t), base family
//   -dH/dx^sigma - sum_mu [ x^mu_t d/ds p_{mu sigma} - x^mu_s d/dt p_{mu sigma} ]
SurfaceSystem hamilton_surface_system(const Hamiltonian& H);

// Pluecker decomposability diagnostic in dimension four:
// xd^12 xd^34 - xd^13 xd^24 + xd^14 xd^23 on /\2 T base
sym::Expr decomposability_residual(const Chart& base);

// ---- Euclidean cross-check --------------------------------------------------
// Samples random second-order graph jets (z_x, z_y, z_xx, z_xy, z_yy) and
// compares the Euler-Lagrange residuals of the Euclidean area Lagrangian in
// R^3, under the graph substitution xd^12 = 1, xd^13 = z_y, xd^23 = -z_x,
// against the minimal-surface residual
//   (1 + z_x^2) z_yy - 2 z_x z_y z_xy + (1 + z_y^2) z_xx.
struct MinimalSurfaceReport {
  int samples = 0;
  // on jets constrained to the minimal-surface equation
  double max_e1 = 0, max_e2 = 0, max_e3 = 0;
  // on unconstrained jets: deviation of E3 / (ms / r^3) from its constant
  double max_ratio_dev = 0;
  bool equivalence = false; // E3 vanishes exactly where the residual does
  double tolerance = 1e-9;
  bool pass() const {
    return equivalence && max_e1 <= tolerance && max_e2 <= tolerance &&
           max_e3 <= tolerance && max_ratio_dev <= tolerance;
  }
};
MinimalSurfaceReport el_vs_minimal_surface_consistency(unsigned seed = 1u,
                                                       int samples = 1000);

} // namespace wedge::geo
