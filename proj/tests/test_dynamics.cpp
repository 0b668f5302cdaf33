#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wedge/dynamics.hpp"

using namespace wedge::geo;
namespace geo = wedge::geo;
namespace sy = wedge::sym;
using sy::Expr;
using sy::Rational;

namespace {

// increasing fiber pairs of a degree-two chart, in fiber order
struct Pairs {
  std::vector<std::pair<int, int>> idx;
  std::vector<std::string> names;
};

Pairs fiber_pairs(const Chart& c) {
  Pairs out;
  int m = 0;
  while (m < c.dim() && c.coord(m).parents.empty()) ++m;
  for (int q = m; q < c.dim(); ++q) {
    out.idx.emplace_back(c.coord(q).parents[0], c.coord(q).parents[1]);
    out.names.push_back(c.coord(q).name);
  }
  return out;
}

// sign-extended mixed fiber y_{ab}^{mu} on the phase chart
Expr y_ext(const Chart& c, int a, int b, int mu) {
  auto h = c.query("y", {{a + 1, b + 1}, {mu + 1}});
  if (!h || h->sign == 0) return sy::num(0);
  return sy::mul(sy::num(h->sign), c.v(h->pos));
}

// the signed trace sum over the mixed block that pairs with base momenta
Expr trace_expr(const Chart& ph, int m, int rho) {
  Expr t;
  for (int eta = 0; eta < m; ++eta) t = sy::add(t, y_ext(ph, eta, rho, eta));
  return t;
}

// name of the stored atom y_{(eta rho)}^{eta}, used to steer one trace sum
std::string trace_knob(const Chart& ph, int rho) {
  int eta = rho == 0 ? 1 : 0;
  auto h = ph.query("y", {{std::min(eta, rho) + 1, std::max(eta, rho) + 1},
                          {eta + 1}});
  REQUIRE(h);
  return ph.coord(h->pos).name;
}

// set `atom` so that the (affine in `atom`) residual R evaluates to zero
void solve_atom(const Expr& R, const std::string& atom, sy::VarAssignment& va) {
  va.set(atom, 0.0);
  double r0 = sy::eval_double(R, va);
  va.set(atom, 1.0);
  double r1 = sy::eval_double(R, va);
  REQUIRE(std::abs(r1 - r0) > 1e-9);
  va.set(atom, -r0 / (r1 - r0));
}

// signed all-pairs view of dL/dxd^{mu sigma}, rebuilt here so the surface
// equation tests do not lean on the library's own bookkeeping
Expr pair_partial_oracle(const Expr& L, const Pairs& pt, int mu, int sigma) {
  if (mu == sigma) return Expr();
  for (size_t i = 0; i < pt.idx.size(); ++i)
    if (pt.idx[i] == std::make_pair(std::min(mu, sigma), std::max(mu, sigma))) {
      Expr d = sy::diff(L, pt.names[i]);
      return mu < sigma ? d : sy::neg(d);
    }
  return Expr();
}

Expr sdif(const std::string& name, std::vector<std::string> orders) {
  return sy::dif(name, std::move(orders), {"t", "s"});
}

// bivariate polynomial surface with analytic derivatives, degree <= 3
struct Poly2 {
  double c[4][4] = {};
  double at(double t, double s, int dt = 0, int ds = 0) const {
    double v = 0;
    for (int a = dt; a < 4; ++a)
      for (int b = ds; b < 4; ++b) {
        double f = c[a][b];
        for (int k = 0; k < dt; ++k) f *= double(a - k);
        for (int k = 0; k < ds; ++k) f *= double(b - k);
        v += f * std::pow(t, a - dt) * std::pow(s, b - ds);
      }
    return v;
  }
};

} // namespace

TEST_CASE("quadratic lagrangian phase equations") {
  for (int m : {2, 3}) {
    Chart M = base_chart(m);
    Lagrangian L = quadratic_lagrangian(M);
    PhaseDynamics D = lagrange_phase(L);
    Pairs pt = fiber_pairs(L.domain);
    REQUIRE((int)D.base_residuals.size() == m);
    REQUIRE(D.momentum_residuals.size() == pt.names.size());
    CHECK(D.constraints.empty());
    // constant coefficients: the base equations say the trace block vanishes
    for (int rho = 0; rho < m; ++rho)
      CHECK(sy::equal(D.base_residuals[rho], trace_expr(D.phase, m, rho)));
    // and the momentum equations say p = -xd
    for (size_t i = 0; i < pt.names.size(); ++i) {
      Expr want = sy::add(sy::var("p_" + pt.names[i].substr(3)),
                          sy::var(pt.names[i]));
      CHECK(sy::equal(D.momentum_residuals[i], want));
    }
  }
}

TEST_CASE("zero lagrangian forces both momentum blocks to vanish") {
  Chart M = base_chart(3);
  PhaseDynamics D = lagrange_phase(make_lagrangian(M, Expr()));
  for (int rho = 0; rho < 3; ++rho)
    CHECK(sy::equal(D.base_residuals[rho], trace_expr(D.phase, 3, rho)));
  Pairs pt = fiber_pairs(wedge_tangent(2, M));
  for (size_t i = 0; i < pt.names.size(); ++i)
    CHECK(sy::identical(D.momentum_residuals[i],
                        sy::var("p_" + pt.names[i].substr(3))));
}

TEST_CASE("area lagrangian phase equations match the metric displays") {
  Chart M = base_chart(3);
  const int m = 3;

  // opaque symmetric metric coefficients depending on the base point
  std::vector<std::string> xs;
  for (int i = 0; i < m; ++i) xs.push_back(M.coord(i).name);
  Metric g(m, std::vector<Expr>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      std::string nm = "g_" + std::to_string(std::min(i, j) + 1) +
                       std::to_string(std::max(i, j) + 1);
      g[i][j] = sy::var(nm, xs);
    }

  Lagrangian L = nambu_goto(M, g);
  PhaseDynamics D = lagrange_phase(L);
  Pairs pt = fiber_pairs(L.domain);

  // the induced product written out from scratch
  std::vector<std::vector<Expr>> G(pt.idx.size(),
                                   std::vector<Expr>(pt.idx.size()));
  Expr q;
  for (size_t i = 0; i < pt.idx.size(); ++i)
    for (size_t j = 0; j < pt.idx.size(); ++j) {
      auto [a, b] = pt.idx[i];
      auto [c, d] = pt.idx[j];
      G[i][j] = sy::sub(sy::mul(g[a][c], g[b][d]), sy::mul(g[a][d], g[b][c]));
      q = sy::add(q, sy::mul(G[i][j], sy::mul(sy::var(pt.names[i]),
                                              sy::var(pt.names[j]))));
    }
  Expr rho = sy::sqrt_(q);

  // momentum block: p_I = -(1/rho) (G xd)_I, i.e. the contracted product
  for (size_t i = 0; i < pt.idx.size(); ++i) {
    Expr gx;
    for (size_t j = 0; j < pt.idx.size(); ++j)
      gx = sy::add(gx, sy::mul(G[i][j], sy::var(pt.names[j])));
    Expr want = sy::add(sy::var("p_" + pt.names[i].substr(3)),
                        sy::div(gx, rho));
    CHECK(sy::identical(D.momentum_residuals[i], want));
  }
  // base block: trace = -(1/(2 rho)) d(w|w)/dx, derivatives hitting only the
  // metric coefficients
  for (int r = 0; r < m; ++r) {
    Expr want = sy::add(trace_expr(D.phase, m, r),
                        sy::div(sy::diff(q, xs[r]), sy::mul(sy::num(2), rho)));
    CHECK(sy::identical(D.base_residuals[r], want));
  }
}

TEST_CASE("area lagrangian phase equations with an indefinite metric") {
  Chart M = base_chart(3);
  Lagrangian L = nambu_goto(M, minkowski_metric(3));
  PhaseDynamics D = lagrange_phase(L);
  Pairs pt = fiber_pairs(L.domain);
  // diag(-1,1,1) induces diag(-1,-1,1) on increasing pairs
  int sig[3] = {-1, -1, 1};
  Expr q;
  for (int i = 0; i < 3; ++i)
    q = sy::add(q, sy::mul(sy::num(sig[i]),
                           sy::pow(sy::var(pt.names[i]), 2)));
  Expr rho = sy::sqrt_(q);
  for (int i = 0; i < 3; ++i) {
    Expr want = sy::add(sy::var("p_" + pt.names[i].substr(3)),
                        sy::div(sy::mul(sy::num(sig[i]), sy::var(pt.names[i])),
                                rho));
    CHECK(sy::identical(D.momentum_residuals[i], want));
  }
  for (int r = 0; r < 3; ++r)
    CHECK(sy::equal(D.base_residuals[r], trace_expr(D.phase, 3, r)));
}

TEST_CASE("legendre map in coordinates") {
  Chart M = base_chart(3);

  Lagrangian quad = quadratic_lagrangian(M);
  CoordMap lin = legendre_map(quad);
  Pairs pt = fiber_pairs(quad.domain);
  for (const auto& nm : pt.names)
    CHECK(sy::identical(lin.entry("p_" + nm.substr(3)),
                        sy::neg(sy::var(nm))));

  // Euclidean area: p_I = -xd^I / rho
  Lagrangian ng = nambu_goto(M, euclidean_metric(3));
  CoordMap pl = legendre_map(ng);
  Expr q;
  for (const auto& nm : pt.names) q = sy::add(q, sy::pow(sy::var(nm), 2));
  for (const auto& nm : pt.names)
    CHECK(sy::identical(pl.entry("p_" + nm.substr(3)),
                        sy::neg(sy::div(sy::var(nm), sy::sqrt_(q)))));
}

TEST_CASE("legendre image of the area lagrangian lies on the unit sphere") {
  Chart M = base_chart(3);
  // euclidean metric first, then a full symmetric one checked against the
  // dual product (the cometric is the exact inverse of the induced product)
  Metric g2 = {{sy::num(2), sy::num(1), sy::num(0)},
               {sy::num(1), sy::num(3), sy::num(1)},
               {sy::num(0), sy::num(1), sy::num(2)}};
  for (int which = 0; which < 2; ++which) {
    Metric g = which == 0 ? euclidean_metric(3) : g2;
    Lagrangian ng = nambu_goto(M, g);
    CoordMap pl = legendre_map(ng);
    Pairs pt = fiber_pairs(ng.domain);
    Metric Gd = bivector_cometric(M, g);

    std::mt19937_64 rng(0x5eedULL + which);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int it = 0; it < 100; ++it) {
      sy::VarAssignment va;
      double norm2 = 0;
      std::vector<double> w(pt.names.size());
      for (size_t i = 0; i < pt.names.size(); ++i) {
        w[i] = U(rng);
        norm2 += w[i] * w[i];
      }
      if (norm2 < 0.5) { --it; continue; }
      for (size_t i = 0; i < pt.names.size(); ++i) va.set(pt.names[i], w[i]);
      std::vector<double> p(pt.names.size());
      for (size_t i = 0; i < pt.names.size(); ++i)
        p[i] = sy::eval_double(pl.entry("p_" + pt.names[i].substr(3)), va);
      double pp = 0;
      for (size_t i = 0; i < pt.names.size(); ++i)
        for (size_t j = 0; j < pt.names.size(); ++j)
          pp += sy::eval_double(Gd[i][j], va) * p[i] * p[j];
      CHECK(std::abs(pp - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("bivector product and dual product are exact inverses") {
  for (int m : {3, 4}) {
    Chart M = base_chart(m);
    std::mt19937_64 rng(101 + m);
    Metric g(m, std::vector<Expr>(m));
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        long v = i == j ? 5 + (long)(rng() % 3) : (long)(rng() % 3) - 1;
        g[i][j] = g[j][i] = sy::num(v);
      }
    Metric G = bivector_metric(M, g);
    Metric Gd = bivector_cometric(M, g);
    const int C = (int)G.size();
    for (int i = 0; i < C; ++i)
      for (int j = 0; j < C; ++j) {
        Expr s;
        for (int k = 0; k < C; ++k) s = sy::add(s, sy::mul(G[i][k], Gd[k][j]));
        CHECK(sy::identical(s, sy::num(i == j ? 1 : 0)));
      }
  }
}

TEST_CASE("bivector product carries the pair-block symmetries") {
  Chart M = base_chart(3);
  std::vector<std::string> xs = {"x_1", "x_2", "x_3"};
  Metric g(3, std::vector<Expr>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      g[i][j] = sy::var("g_" + std::to_string(std::min(i, j) + 1) +
                            std::to_string(std::max(i, j) + 1),
                        xs);
  // the rank-four coefficient h_{abcd} = (g_ac g_bd - g_ad g_bc)/2 is
  // antisymmetric inside each pair and symmetric across them; the stored
  // matrix is its value at increasing pairs, doubled
  auto h = [&](int a, int b, int c, int d) {
    return sy::mul(sy::num(1, 2), sy::sub(sy::mul(g[a][c], g[b][d]),
                                          sy::mul(g[a][d], g[b][c])));
  };
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) {
          CHECK(sy::identical(h(a, b, c, d), sy::neg(h(b, a, c, d))));
          CHECK(sy::identical(h(a, b, c, d), sy::neg(h(a, b, d, c))));
          CHECK(sy::identical(h(a, b, c, d), h(c, d, a, b)));
        }
  Metric G = bivector_metric(M, g);
  Pairs pt = fiber_pairs(wedge_tangent(2, M));
  for (size_t i = 0; i < pt.idx.size(); ++i)
    for (size_t j = 0; j < pt.idx.size(); ++j)
      CHECK(sy::identical(G[i][j],
                          sy::mul(sy::num(2), h(pt.idx[i].first, pt.idx[i].second,
                                                pt.idx[j].first, pt.idx[j].second))));
}

TEST_CASE("hamilton phase equations") {
  for (int m : {2, 3}) {
    Chart M = base_chart(m);
    Chart CW = wedge_cotangent(2, M);
    Pairs pt = fiber_pairs(CW);

    Expr H;
    for (const auto& nm : pt.names)
      H = sy::add(H, sy::mul(sy::num(1, 2), sy::pow(sy::var(nm), 2)));
    PhaseDynamics D = hamilton_phase(make_hamiltonian(M, H));
    for (int rho = 0; rho < m; ++rho)
      CHECK(sy::equal(D.base_residuals[rho], trace_expr(D.phase, m, rho)));
    for (size_t i = 0; i < pt.names.size(); ++i) {
      Expr want = sy::sub(sy::var("xd^" + pt.names[i].substr(2)),
                          sy::var(pt.names[i]));
      CHECK(sy::equal(D.momentum_residuals[i], want));
    }

    // a constant hamiltonian freezes the velocity block entirely
    PhaseDynamics Dc = hamilton_phase(make_hamiltonian(M, sy::num(5)));
    for (int rho = 0; rho < m; ++rho)
      CHECK(sy::equal(Dc.base_residuals[rho], trace_expr(Dc.phase, m, rho)));
    for (size_t i = 0; i < pt.names.size(); ++i)
      CHECK(sy::identical(Dc.momentum_residuals[i],
                          sy::var("xd^" + pt.names[i].substr(2))));
  }
}

TEST_CASE("hyperregular lagrangian and its hamiltonian cut the same set") {
  Chart M = base_chart(3);
  Chart W = wedge_tangent(2, M);
  Pairs pt = fiber_pairs(W);
  const int C = (int)pt.names.size();

  Metric Q = {{sy::num(3), sy::num(1), sy::num(0)},
              {sy::num(1), sy::num(4), sy::num(1)},
              {sy::num(0), sy::num(1), sy::num(3)}};
  Expr V = sy::add(sy::mul(sy::num(2), sy::pow(sy::var("x_1"), 2)),
                   sy::add(sy::mul(sy::var("x_2"), sy::var("x_3")),
                           sy::mul(sy::num(-3), sy::var("x_2"))));
  Lagrangian L = quadratic_lagrangian(M, Q, V);
  PhaseDynamics DL = lagrange_phase(L);

  // legendre partner: H = -(1/2) p Qinv p - V, so that dH/dp = -Qinv p = xd
  // on the image p = -Q xd
  Metric Qi = inverse_metric(Q);
  Expr H = sy::neg(V);
  for (int i = 0; i < C; ++i)
    for (int j = 0; j < C; ++j)
      H = sy::sub(H, sy::mul(sy::num(1, 2),
                             sy::mul(Qi[i][j],
                                     sy::mul(sy::var("p_" + pt.names[i].substr(3)),
                                             sy::var("p_" + pt.names[j].substr(3))))));
  PhaseDynamics DH = hamilton_phase(make_hamiltonian(M, H));
  REQUIRE(DL.phase.same_coords(DH.phase));

  const Chart& ph = DL.phase;
  std::mt19937_64 rng(0xABCDEFULL);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  auto fill_random = [&](sy::VarAssignment& va) {
    for (int i = 0; i < ph.dim(); ++i) va.set(ph.coord(i).name, U(rng));
  };
  auto eval_Q = [&](int i, int j) {
    return std::get<Rational>(sy::eval(Q[i][j], {})).to_double();
  };
  auto eval_Qi = [&](int i, int j) {
    return std::get<Rational>(sy::eval(Qi[i][j], {})).to_double();
  };

  for (int it = 0; it < 100; ++it) {
    // a point on D(L): p := -Q xd, trace block solved from the base equations
    sy::VarAssignment va;
    fill_random(va);
    std::vector<double> xd(C);
    for (int i = 0; i < C; ++i) xd[i] = U(rng);
    for (int i = 0; i < C; ++i) {
      va.set(pt.names[i], xd[i]);
      double p = 0;
      for (int j = 0; j < C; ++j) p -= eval_Q(i, j) * xd[j];
      va.set("p_" + pt.names[i].substr(3), p);
    }
    for (int rho = 0; rho < 3; ++rho)
      solve_atom(DL.base_residuals[rho], trace_knob(ph, rho), va);
    for (const Expr& r : DL.all()) REQUIRE(std::abs(sy::eval_double(r, va)) <= 1e-10);
    for (const Expr& r : DH.all()) CHECK(std::abs(sy::eval_double(r, va)) <= 1e-10);

    // a point on D(H): xd := -Qinv p
    sy::VarAssignment vb;
    fill_random(vb);
    std::vector<double> p(C);
    for (int i = 0; i < C; ++i) p[i] = U(rng);
    for (int i = 0; i < C; ++i) {
      vb.set("p_" + pt.names[i].substr(3), p[i]);
      double x = 0;
      for (int j = 0; j < C; ++j) x -= eval_Qi(i, j) * p[j];
      vb.set(pt.names[i], x);
    }
    for (int rho = 0; rho < 3; ++rho)
      solve_atom(DH.base_residuals[rho], trace_knob(ph, rho), vb);
    for (const Expr& r : DH.all()) REQUIRE(std::abs(sy::eval_double(r, vb)) <= 1e-10);
    for (const Expr& r : DL.all()) CHECK(std::abs(sy::eval_double(r, vb)) <= 1e-10);
  }
}

TEST_CASE("phase residuals avoid higher fiber blocks") {
  Chart M = base_chart(3);
  std::vector<PhaseDynamics> all;
  all.push_back(lagrange_phase(nambu_goto(M, euclidean_metric(3))));
  all.push_back(lagrange_phase(quadratic_lagrangian(M)));
  Chart CW = wedge_cotangent(2, M);
  Expr H;
  for (const auto& nm : fiber_pairs(CW).names)
    H = sy::add(H, sy::mul(sy::num(1, 2), sy::pow(sy::var(nm), 2)));
  all.push_back(hamilton_phase(make_hamiltonian(M, H)));
  all.push_back(morse_family_phase(nambu_goto_family(M, euclidean_metric(3))));

  for (const PhaseDynamics& D : all)
    for (const Expr& r : D.all())
      for (const auto& a : sy::atoms(r)) {
        if (a.name == "r") continue; // declared parameter
        int pos = D.phase.position(a.name);
        REQUIRE(pos >= 0);
        CHECK(D.phase.coord(pos).d2 <= 1);
      }
}

TEST_CASE("legendre image satisfies the momentum equations identically") {
  Chart M = base_chart(3);
  for (int which = 0; which < 2; ++which) {
    Lagrangian L = which == 0 ? quadratic_lagrangian(M)
                              : nambu_goto(M, euclidean_metric(3));
    PhaseDynamics D = lagrange_phase(L);
    CoordMap pl = legendre_map(L);
    std::map<sy::AtomKey, Expr> repl;
    for (const auto& [nm, e] : pl.entries)
      repl[{false, nm, {}}] = e;
    for (const Expr& r : D.momentum_residuals)
      CHECK(sy::subst(r, repl).is_zero());
  }
}

TEST_CASE("surface equations of an x-independent lagrangian are a pure flux") {
  Chart M = base_chart(3);
  SurfaceSystem el = euler_lagrange_residual(quadratic_lagrangian(M));
  REQUIRE(el.residuals.size() == 3);
  // no base-point dependence: the residual is a divergence, so killing every
  // second derivative must kill it entirely
  for (const Expr& r : el.residuals) {
    std::map<sy::AtomKey, Expr> kill;
    for (const auto& a : sy::atoms(r))
      if (a.is_dif && a.orders.size() == 2) kill[a] = sy::num(0);
    CHECK_FALSE(kill.empty());
    CHECK(sy::subst(r, kill).is_zero());
  }
  // with a potential the zeroth-order part survives
  SurfaceSystem elv = euler_lagrange_residual(
      quadratic_lagrangian(M, {}, sy::pow(sy::var("x_1"), 2)));
  std::map<sy::AtomKey, Expr> kill;
  for (const auto& a : sy::atoms(elv.residuals[0]))
    if (a.is_dif && a.orders.size() == 2) kill[a] = sy::num(0);
  Expr left = sy::subst(elv.residuals[0], kill);
  CHECK(sy::equal(left, sy::mul(sy::num(-2), sy::var("x_1", {"t", "s"}))));
}

TEST_CASE("surface equations match a discrete action gradient") {
  Chart M = base_chart(3);
  Pairs pt = fiber_pairs(wedge_tangent(2, M));
  const int C = (int)pt.names.size(), m = 3;

  Metric Q = {{sy::num(2), sy::num(1), sy::num(0)},
              {sy::num(1), sy::num(3), sy::num(-1)},
              {sy::num(0), sy::num(-1), sy::num(2)}};
  Expr V = sy::add(sy::mul(sy::num(1, 2), sy::pow(sy::var("x_1"), 2)),
                   sy::mul(sy::var("x_2"), sy::var("x_3")));
  Lagrangian L = quadratic_lagrangian(M, Q, V);
  SurfaceSystem el = euler_lagrange_residual(L);

  std::mt19937_64 rng(0xD15C7E7EULL);
  std::uniform_real_distribution<double> U(-0.5, 0.5);

  // evaluate L at one grid node from central-difference jets
  auto discrete_residual = [&](const Poly2 P[3], int sigma, double h) {
    const int N = 5, ctr = 2; // node grid (i,j) in [0,5)^2, center perturbed
    auto node_val = [&](int mu, int i, int j, double bump) {
      double v = P[mu].at((i - ctr) * h, (j - ctr) * h);
      return (i == ctr && j == ctr) ? v + bump : v;
    };
    auto action = [&](double bump) {
      double S = 0;
      for (int i = 1; i < N - 1; ++i)
        for (int j = 1; j < N - 1; ++j) {
          sy::VarAssignment va;
          double dt[3], ds[3];
          for (int mu = 0; mu < m; ++mu) {
            double b = mu == sigma ? bump : 0.0;
            va.set("x_" + std::to_string(mu + 1), node_val(mu, i, j, b));
            dt[mu] = (node_val(mu, i + 1, j, b) - node_val(mu, i - 1, j, b)) /
                     (2 * h);
            ds[mu] = (node_val(mu, i, j + 1, b) - node_val(mu, i, j - 1, b)) /
                     (2 * h);
          }
          for (int k = 0; k < C; ++k) {
            auto [a, b2] = pt.idx[k];
            va.set(pt.names[k], dt[a] * ds[b2] - ds[a] * dt[b2]);
          }
          S += h * h * sy::eval_double(L.L, va);
        }
      return S;
    };
    const double eps = 1e-4;
    return (action(eps) - action(-eps)) / (2 * eps) / (h * h);
  };

  for (int trial = 0; trial < 3; ++trial) {
    Poly2 P[3];
    for (auto& s : P)
      for (auto& row : s.c)
        for (double& v : row) v = U(rng);
    for (int sigma = 0; sigma < m; ++sigma) {
      // continuous residual at the center point (0, 0)
      sy::VarAssignment va;
      for (int mu = 0; mu < m; ++mu) {
        std::string nm = "x_" + std::to_string(mu + 1);
        va.set(nm, P[mu].at(0, 0));
        va.set(sy::atom_name({true, nm, {"t"}}), P[mu].at(0, 0, 1, 0));
        va.set(sy::atom_name({true, nm, {"s"}}), P[mu].at(0, 0, 0, 1));
        va.set(sy::atom_name({true, nm, {"t", "t"}}), P[mu].at(0, 0, 2, 0));
        va.set(sy::atom_name({true, nm, {"s", "t"}}), P[mu].at(0, 0, 1, 1));
        va.set(sy::atom_name({true, nm, {"s", "s"}}), P[mu].at(0, 0, 0, 2));
      }
      double R = sy::eval_double(el.residuals[sigma], va);
      double e1 = std::abs(discrete_residual(P, sigma, 0.1) - R);
      double e2 = std::abs(discrete_residual(P, sigma, 0.05) - R);
      CHECK(e2 <= 0.05);
      if (e1 > 1e-7) { // ratio is meaningful only above roundoff
        CHECK(e1 / e2 >= 2.5);
        CHECK(e1 / e2 <= 6.5);
      }
    }
  }
}

TEST_CASE("area surface equation reduces to the minimal surface equation") {
  Chart M = base_chart(3);
  SurfaceSystem el = euler_lagrange_residual(nambu_goto(M, euclidean_metric(3)));

  // graph surface x_1 = t, x_2 = s, x_3 = z(t, s)
  std::map<sy::AtomKey, Expr> graph;
  auto put = [&](const char* nm, std::vector<std::string> o, Expr v) {
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
  Expr E3 = sy::subst(el.residuals[2], graph);

  std::mt19937_64 rng(0x3D5ULL);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int it = 0; it < 200; ++it) {
    sy::VarAssignment va;
    double zx = U(rng), zy = U(rng), zxx = U(rng), zxy = U(rng), zyy = U(rng);
    va.set("zx", zx);
    va.set("zy", zy);
    va.set("zxx", zxx);
    va.set("zxy", zxy);
    va.set("zyy", zyy);
    double ms = (1 + zx * zx) * zyy - 2 * zx * zy * zxy + (1 + zy * zy) * zxx;
    double r3 = std::pow(1 + zx * zx + zy * zy, 1.5);
    // E3 = -(divergence form) = -[(d/ds)(zy/rho) + (d/dt)(zx/rho)] = -ms/rho^3
    double e3 = sy::eval_double(E3, va);
    CHECK(std::abs(e3 * r3 + ms) <= 1e-12 * std::max(1.0, std::abs(ms)));
  }

  // plane jets solve every component exactly
  sy::VarAssignment flat;
  flat.set("zx", 0.7);
  flat.set("zy", -0.3);
  flat.set("zxx", 0.0);
  flat.set("zxy", 0.0);
  flat.set("zyy", 0.0);
  for (int k = 0; k < 3; ++k)
    CHECK(std::abs(sy::eval_double(sy::subst(el.residuals[k], graph), flat)) ==
          0.0);
}

TEST_CASE("surface equation consistency suite") {
  MinimalSurfaceReport rep = el_vs_minimal_surface_consistency(7u, 1000);
  CHECK(rep.samples == 1000);
  CHECK(rep.equivalence);
  CHECK(rep.max_e1 <= 1e-9);
  CHECK(rep.max_e2 <= 1e-9);
  CHECK(rep.max_e3 <= 1e-9);
  CHECK(rep.max_ratio_dev <= 1e-9);
  CHECK(rep.pass());
}

TEST_CASE("morse family of the area hamiltonian") {
  Chart M = base_chart(3);
  Hamiltonian F = nambu_goto_family(M, euclidean_metric(3));
  PhaseDynamics D = morse_family_phase(F);
  Chart CW = wedge_cotangent(2, M);
  Pairs pt = fiber_pairs(CW);

  Expr q;
  for (const auto& nm : pt.names) q = sy::add(q, sy::pow(sy::var(nm), 2));
  Expr root = sy::sqrt_(q);

  // stationarity over the parameter is exactly the unit-sphere constraint
  REQUIRE(D.constraints.size() == 1);
  CHECK(sy::identical(D.constraints[0], sy::sub(root, sy::num(1))));
  // hamilton block: velocity matches r times the unit momentum direction
  for (size_t i = 0; i < pt.names.size(); ++i) {
    Expr want = sy::sub(sy::var("xd^" + pt.names[i].substr(2)),
                        sy::div(sy::mul(sy::var("r"), sy::var(pt.names[i])),
                                root));
    CHECK(sy::identical(D.momentum_residuals[i], want));
  }
  for (int rho = 0; rho < 3; ++rho)
    CHECK(sy::equal(D.base_residuals[rho], trace_expr(D.phase, 3, rho)));

  // the family covers the lagrangian dynamics at r = -rho: points built from
  // the legendre map of the area lagrangian satisfy every residual
  std::mt19937_64 rng(0xFACEULL);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  for (int it = 0; it < 50; ++it) {
    double w[3], n2 = 0;
    for (double& v : w) {
      v = U(rng);
      n2 += v * v;
    }
    if (n2 < 0.5) { --it; continue; }
    double rho = std::sqrt(n2);
    sy::VarAssignment va;
    for (int i = 0; i < D.phase.dim(); ++i) va.set(D.phase.coord(i).name, 0.0);
    for (size_t i = 0; i < pt.names.size(); ++i) {
      va.set("xd^" + pt.names[i].substr(2), w[i]);
      va.set(pt.names[i], -w[i] / rho);
    }
    va.set("r", -rho);
    for (const Expr& r : D.all())
      CHECK(std::abs(sy::eval_double(r, va)) <= 1e-12);
  }
}

TEST_CASE("morse family with a linear constraint") {
  Chart M = base_chart(3);
  Expr F = sy::mul(sy::var("r"), sy::sub(sy::var("p_12"), sy::num(2)));
  PhaseDynamics D = morse_family_phase(make_morse_family(M, F, {"r"}));
  REQUIRE(D.constraints.size() == 1);
  CHECK(sy::identical(D.constraints[0], sy::sub(sy::var("p_12"), sy::num(2))));
  Pairs pt = fiber_pairs(wedge_cotangent(2, M));
  for (size_t i = 0; i < pt.names.size(); ++i) {
    Expr xd = sy::var("xd^" + pt.names[i].substr(2));
    Expr want = pt.names[i] == "p_12" ? sy::sub(xd, sy::var("r")) : xd;
    CHECK(sy::identical(D.momentum_residuals[i], want));
  }
}

TEST_CASE("degenerate morse family is rejected") {
  Chart M = base_chart(3);
  Hamiltonian F = make_morse_family(M, sy::sub(sy::var("p_12"), sy::num(1)),
                                    {"r"});
  CHECK_THROWS_WITH_AS(morse_family_phase(F), "stationarity eliminates nothing",
                       std::runtime_error);
}

TEST_CASE("hamilton surface equations in components") {
  Chart M = base_chart(3);
  Chart CW = wedge_cotangent(2, M);
  Pairs pt = fiber_pairs(CW);
  Expr H;
  for (const auto& nm : pt.names)
    H = sy::add(H, sy::mul(sy::num(1, 2), sy::pow(sy::var(nm), 2)));
  SurfaceSystem hs = hamilton_surface_system(make_hamiltonian(M, H));
  REQUIRE(hs.pair_residuals.size() == pt.names.size());
  REQUIRE(hs.residuals.size() == 3);

  // dH/dp = p against the bracket of the unknown surface components
  for (size_t i = 0; i < pt.names.size(); ++i) {
    auto [a, b] = pt.idx[i];
    std::string na = "x_" + std::to_string(a + 1),
                nb = "x_" + std::to_string(b + 1);
    Expr want = sy::sub(sy::var(pt.names[i], {"t", "s"}),
                        sy::sub(sy::mul(sdif(na, {"t"}), sdif(nb, {"s"})),
                                sy::mul(sdif(na, {"s"}), sdif(nb, {"t"}))));
    CHECK(sy::equal(hs.pair_residuals[i], want));
  }
  // base family: pure momentum flux, H carrying no base dependence
  auto pv = [&](int mu, int sigma) -> Expr {
    for (size_t i = 0; i < pt.idx.size(); ++i)
      if (pt.idx[i] == std::make_pair(std::min(mu, sigma), std::max(mu, sigma))) {
        return mu < sigma ? sy::num(1) : sy::num(-1);
      }
    return Expr();
  };
  for (int sigma = 0; sigma < 3; ++sigma) {
    Expr want;
    for (int mu = 0; mu < 3; ++mu) {
      if (mu == sigma) continue;
      std::string nm = "x_" + std::to_string(mu + 1);
      std::string pn;
      for (size_t i = 0; i < pt.idx.size(); ++i)
        if (pt.idx[i] ==
            std::make_pair(std::min(mu, sigma), std::max(mu, sigma)))
          pn = pt.names[i];
      Expr sgn = pv(mu, sigma);
      want = sy::sub(want, sy::mul(sgn, sy::mul(sdif(nm, {"t"}), sdif(pn, {"s"}))));
      want = sy::add(want, sy::mul(sgn, sy::mul(sdif(nm, {"s"}), sdif(pn, {"t"}))));
    }
    CHECK(sy::equal(hs.residuals[sigma], want));
  }
}

TEST_CASE("flipping the contraction convention only reflects the momenta") {
  Chart M = base_chart(3);
  Lagrangian L = nambu_goto(M, euclidean_metric(3));
  Pairs pt = fiber_pairs(L.domain);
  SurfaceSystem el = euler_lagrange_residual(L);

  // opposite insertion convention: momenta change sign, so both displayed
  // equation families flip, and the surface equations they cut are unchanged
  std::map<sy::AtomKey, Expr> jet;
  for (int mu = 0; mu < 3; ++mu) {
    std::string nm = "x_" + std::to_string(mu + 1);
    jet[{false, nm, {}}] = sy::var(nm, {"t", "s"});
  }
  for (size_t i = 0; i < pt.idx.size(); ++i) {
    auto [a, b] = pt.idx[i];
    std::string na = "x_" + std::to_string(a + 1),
                nb = "x_" + std::to_string(b + 1);
    jet[{false, pt.names[i], {}}] =
        sy::sub(sy::mul(sdif(na, {"t"}), sdif(nb, {"s"})),
                sy::mul(sdif(na, {"s"}), sdif(nb, {"t"})));
  }
  for (int sigma = 0; sigma < 3; ++sigma) {
    Expr res = sy::neg(sy::subst(sy::diff(L.L, "x_" + std::to_string(sigma + 1)),
                                 jet));
    for (int mu = 0; mu < 3; ++mu) {
      if (mu == sigma) continue;
      Expr P = sy::neg(sy::subst(pair_partial_oracle(L.L, pt, mu, sigma), jet));
      std::string nm = "x_" + std::to_string(mu + 1);
      res = sy::sub(res, sy::mul(sdif(nm, {"t"}), sy::diff(P, "s")));
      res = sy::add(res, sy::mul(sdif(nm, {"s"}), sy::diff(P, "t")));
    }
    // flipped residual is the exact negative: identical zero set
    CHECK(sy::equal(sy::add(res, el.residuals[sigma]), Expr()));
  }
}

TEST_CASE("decomposability diagnostic") {
  Chart M4 = base_chart(4);
  Expr pl = decomposability_residual(M4);
  Expr want = sy::add(
      sy::sub(sy::mul(sy::var("xd^12"), sy::var("xd^34")),
              sy::mul(sy::var("xd^13"), sy::var("xd^24"))),
      sy::mul(sy::var("xd^14"), sy::var("xd^23")));
  CHECK(sy::identical(pl, want));
  CHECK_THROWS_AS(decomposability_residual(base_chart(3)),
                  std::invalid_argument);
}

TEST_CASE("generating functions reject foreign atoms") {
  Chart M = base_chart(3);
  CHECK_THROWS_AS(make_lagrangian(M, sy::var("q")), std::invalid_argument);
  CHECK_THROWS_AS(make_lagrangian(M, sy::var("g", {"q"})),
                  std::invalid_argument);
  // momenta live on the other side
  CHECK_THROWS_AS(make_lagrangian(M, sy::var("p_12")), std::invalid_argument);
  CHECK_THROWS_AS(make_hamiltonian(M, sy::var("xd^12")), std::invalid_argument);
  // parameters must be declared
  CHECK_THROWS_AS(make_hamiltonian(M, sy::mul(sy::var("r"), sy::var("p_12"))),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_morse_family(M, sy::var("p_12"), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(hamilton_phase(nambu_goto_family(M, euclidean_metric(3))),
                  std::invalid_argument);
  CHECK_THROWS_AS(quadratic_lagrangian(M, {{sy::num(1)}}),
                  std::invalid_argument);
}
