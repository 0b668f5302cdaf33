#include "wedge/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>

namespace wedge::geo {

namespace sy = wedge::sym;
using sy::AtomKey;
using sy::Expr;
using sy::Rational;

namespace {

// leaf walk over the expression tree (atoms() drops dependency metadata,
// which is exactly what validation needs to inspect)
void walk_leaves(const Expr& e, const std::function<void(const sy::Node&)>& fn) {
  const sy::Node& n = e.node();
  switch (n.kind) {
  case sy::Kind::Num: return;
  case sy::Kind::Var:
  case sy::Kind::Dif: fn(n); return;
  case sy::Kind::Term:
    for (const auto& f : n.factors) walk_leaves(f.base, fn);
    return;
  case sy::Kind::Sum:
    for (const auto& t : n.terms) walk_leaves(t, fn);
    return;
  }
}

// a generating function may reference chart coordinates, declared parameters,
// and opaque functions of chart coordinates (metric coefficients and such)
void validate_atoms(const Expr& e, const Chart& domain,
                    const std::vector<std::string>& params, const char* who) {
  walk_leaves(e, [&](const sy::Node& n) {
    if (n.kind == sy::Kind::Var && domain.has(n.name)) return;
    if (std::find(params.begin(), params.end(), n.name) != params.end())
      return;
    if (!n.deps.empty()) {
      for (const std::string& d : n.deps)
        if (!domain.has(d))
          throw std::invalid_argument(std::string(who) + ": " + n.name +
                                      " depends on non-chart variable " + d);
      return;
    }
    throw std::invalid_argument(std::string(who) +
                                ": references non-chart variable " + n.name);
  });
}

Expr det_rec(const std::vector<std::vector<Expr>>& a, int row, unsigned mask) {
  const int n = (int)a.size();
  if (row == n) return sy::num(1);
  Expr acc;
  int pos = 0;
  for (int c = 0; c < n; ++c) {
    if (mask & (1u << c)) continue;
    Expr t = sy::mul(a[row][c], det_rec(a, row + 1, mask | (1u << c)));
    acc = (pos % 2 == 0) ? sy::add(acc, t) : sy::sub(acc, t);
    ++pos;
  }
  return acc;
}

void check_square_symmetric(const Metric& g, int m, const char* who) {
  if ((int)g.size() != m)
    throw std::invalid_argument(std::string(who) + ": matrix size mismatch");
  for (const auto& row : g)
    if ((int)row.size() != m)
      throw std::invalid_argument(std::string(who) + ": matrix is not square");
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (!sy::identical(g[i][j], g[j][i]))
        throw std::invalid_argument(std::string(who) +
                                    ": matrix is not symmetric");
}

// increasing pairs in chart fiber order, with the fiber coordinate name
struct PairTable {
  std::vector<std::pair<int, int>> pairs;
  std::vector<std::string> names;
};

PairTable pair_table(const Chart& wedge2) {
  PairTable t;
  int m = 0;
  while (m < wedge2.dim() && wedge2.coord(m).parents.empty()) ++m;
  for (int q = m; q < wedge2.dim(); ++q) {
    const auto& pr = wedge2.coord(q).parents;
    t.pairs.emplace_back(pr[0], pr[1]);
    t.names.push_back(wedge2.coord(q).name);
  }
  return t;
}

// signed first-order derivative dL/dxd^{mu sigma} in the all-pairs view
Expr pair_partial(const Expr& L, const PairTable& pt, int mu, int sigma) {
  if (mu == sigma) return Expr();
  for (size_t i = 0; i < pt.pairs.size(); ++i) {
    if (pt.pairs[i] == std::make_pair(std::min(mu, sigma), std::max(mu, sigma))) {
      Expr d = sy::diff(L, pt.names[i]);
      return mu < sigma ? d : sy::neg(d);
    }
  }
  return Expr();
}

Expr surface_var(const std::string& name) { return sy::var(name, {"t", "s"}); }

Expr surface_d(const std::string& name, const char* axis) {
  return sy::dif(name, {axis}, {"t", "s"});
}

} // namespace

std::vector<Expr> PhaseDynamics::all() const {
  std::vector<Expr> out = base_residuals;
  out.insert(out.end(), momentum_residuals.begin(), momentum_residuals.end());
  out.insert(out.end(), constraints.begin(), constraints.end());
  return out;
}

Lagrangian make_lagrangian(const Chart& base, const Expr& L, Metric metric) {
  if (base.depth() != 0)
    throw std::invalid_argument("make_lagrangian expects a plain manifold chart");
  Chart domain = wedge_tangent(2, base);
  validate_atoms(L, domain, {}, "make_lagrangian");
  if (!metric.empty()) check_square_symmetric(metric, base.dim(), "make_lagrangian");
  return Lagrangian{base, domain, L, std::move(metric)};
}

Hamiltonian make_hamiltonian(const Chart& base, const Expr& H) {
  if (base.depth() != 0)
    throw std::invalid_argument("make_hamiltonian expects a plain manifold chart");
  Chart domain = wedge_cotangent(2, base);
  validate_atoms(H, domain, {}, "make_hamiltonian");
  return Hamiltonian{base, domain, H, {}};
}

Hamiltonian make_morse_family(const Chart& base, const Expr& F,
                              std::vector<std::string> parameters) {
  if (parameters.empty())
    throw std::invalid_argument("make_morse_family needs parameters");
  Chart domain = wedge_cotangent(2, base);
  validate_atoms(F, domain, parameters, "make_morse_family");
  return Hamiltonian{base, domain, F, std::move(parameters)};
}

Metric euclidean_metric(int m) {
  Metric g(m, std::vector<Expr>(m));
  for (int i = 0; i < m; ++i) g[i][i] = sy::num(1);
  return g;
}

Metric minkowski_metric(int m) {
  Metric g = euclidean_metric(m);
  g[0][0] = sy::num(-1);
  return g;
}

Metric inverse_metric(const Metric& g) {
  const int m = (int)g.size();
  check_square_symmetric(g, m, "inverse_metric");
  std::vector<std::vector<Expr>> a(m, std::vector<Expr>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a[i][j] = g[i][j];
  Expr det = det_rec(a, 0, 0u);
  Metric inv(m, std::vector<Expr>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      // cofactor of (j, i) over the determinant
      std::vector<std::vector<Expr>> minor;
      for (int r = 0; r < m; ++r) {
        if (r == j) continue;
        std::vector<Expr> row;
        for (int c = 0; c < m; ++c)
          if (c != i) row.push_back(a[r][c]);
        minor.push_back(std::move(row));
      }
      Expr cof = minor.empty() ? sy::num(1) : det_rec(minor, 0, 0u);
      if ((i + j) % 2 == 1) cof = sy::neg(cof);
      inv[i][j] = sy::div(cof, det);
    }
  return inv;
}

Metric bivector_metric(const Chart& base, const Metric& g) {
  check_square_symmetric(g, base.dim(), "bivector_metric");
  PairTable pt = pair_table(wedge_tangent(2, base));
  const int C = (int)pt.pairs.size();
  Metric G(C, std::vector<Expr>(C));
  for (int i = 0; i < C; ++i)
    for (int j = 0; j < C; ++j) {
      auto [a, b] = pt.pairs[i];
      auto [c, d] = pt.pairs[j];
      G[i][j] = sy::sub(sy::mul(g[a][c], g[b][d]), sy::mul(g[a][d], g[b][c]));
    }
  return G;
}

Metric bivector_cometric(const Chart& base, const Metric& g) {
  return bivector_metric(base, inverse_metric(g));
}

Lagrangian nambu_goto(const Chart& base, const Metric& g) {
  Chart W = wedge_tangent(2, base);
  PairTable pt = pair_table(W);
  Metric G = bivector_metric(base, g);
  Expr q;
  for (size_t i = 0; i < pt.names.size(); ++i)
    for (size_t j = 0; j < pt.names.size(); ++j)
      q = sy::add(q, sy::mul(G[i][j], sy::mul(sy::var(pt.names[i]),
                                              sy::var(pt.names[j]))));
  return make_lagrangian(base, sy::sqrt_(q), g);
}

Lagrangian quadratic_lagrangian(const Chart& base, const Metric& Q,
                                const sym::Expr& potential) {
  Chart W = wedge_tangent(2, base);
  PairTable pt = pair_table(W);
  const int C = (int)pt.names.size();
  Metric q = Q;
  if (q.empty()) {
    q.assign(C, std::vector<Expr>(C));
    for (int i = 0; i < C; ++i) q[i][i] = sy::num(1);
  }
  check_square_symmetric(q, C, "quadratic_lagrangian");
  Expr L;
  for (int i = 0; i < C; ++i)
    for (int j = 0; j < C; ++j)
      L = sy::add(L, sy::mul(sy::num(1, 2),
                             sy::mul(q[i][j], sy::mul(sy::var(pt.names[i]),
                                                      sy::var(pt.names[j])))));
  L = sy::sub(L, potential);
  return make_lagrangian(base, L);
}

Hamiltonian nambu_goto_family(const Chart& base, const Metric& g) {
  Chart CW = wedge_cotangent(2, base);
  PairTable pt = pair_table(CW);
  Metric G = bivector_cometric(base, g);
  Expr q;
  for (size_t i = 0; i < pt.names.size(); ++i)
    for (size_t j = 0; j < pt.names.size(); ++j)
      q = sy::add(q, sy::mul(G[i][j], sy::mul(sy::var(pt.names[i]),
                                              sy::var(pt.names[j]))));
  Expr F = sy::mul(sy::var("r"), sy::sub(sy::sqrt_(q), sy::num(1)));
  return make_morse_family(base, F, {"r"});
}

PhaseDynamics lagrange_phase(const Lagrangian& Lg) {
  validate_atoms(Lg.L, Lg.domain, {}, "lagrange_phase");
  CoordMap al = alpha_n(Lg.base, 2);
  const Chart& W = Lg.domain;
  const int m = Lg.base.dim();
  PhaseDynamics D{al.source, {}, {}, {}};
  // image of dL through alpha: base momenta match dL/dx, wedge momenta
  // match dL/dxd; orientation follows the displayed equation set
  for (int rho = 0; rho < m; ++rho)
    D.base_residuals.push_back(
        sy::sub(sy::diff(Lg.L, W.coord(rho).name),
                al.entry(al.target.coord(W.dim() + rho).name)));
  for (int q = m; q < W.dim(); ++q)
    D.momentum_residuals.push_back(
        sy::sub(sy::diff(Lg.L, W.coord(q).name),
                al.entry(al.target.coord(W.dim() + q).name)));
  return D;
}

PhaseDynamics hamilton_phase(const Hamiltonian& Hm) {
  if (!Hm.parameters.empty())
    throw std::invalid_argument(
        "hamilton_phase expects a plain Hamiltonian, not a Morse family");
  validate_atoms(Hm.H, Hm.domain, Hm.parameters, "hamilton_phase");
  CoordMap be = beta_n(Hm.base, 2);
  const Chart& CW = Hm.domain;
  const int m = Hm.base.dim();
  PhaseDynamics D{be.source, {}, {}, {}};
  for (int rho = 0; rho < m; ++rho)
    D.base_residuals.push_back(
        sy::sub(sy::diff(Hm.H, CW.coord(rho).name),
                be.entry(be.target.coord(CW.dim() + rho).name)));
  for (int q = m; q < CW.dim(); ++q)
    D.momentum_residuals.push_back(
        sy::sub(be.entry(be.target.coord(CW.dim() + q).name),
                sy::diff(Hm.H, CW.coord(q).name)));
  return D;
}

PhaseDynamics morse_family_phase(const Hamiltonian& F) {
  if (F.parameters.empty())
    throw std::invalid_argument("morse_family_phase needs declared parameters");
  validate_atoms(F.H, F.domain, F.parameters, "morse_family_phase");
  CoordMap be = beta_n(F.base, 2);
  const Chart& CW = F.domain;
  const int m = F.base.dim();
  PhaseDynamics D{be.source, {}, {}, {}};
  for (int rho = 0; rho < m; ++rho)
    D.base_residuals.push_back(
        sy::sub(sy::diff(F.H, CW.coord(rho).name),
                be.entry(be.target.coord(CW.dim() + rho).name)));
  for (int q = m; q < CW.dim(); ++q)
    D.momentum_residuals.push_back(
        sy::sub(be.entry(be.target.coord(CW.dim() + q).name),
                sy::diff(F.H, CW.coord(q).name)));
  bool eliminates = false;
  for (const std::string& r : F.parameters) {
    Expr c = sy::diff(F.H, r);
    if (!c.is_zero()) eliminates = true;
    D.constraints.push_back(c);
  }
  if (!eliminates)
    throw std::runtime_error("stationarity eliminates nothing");
  return D;
}

CoordMap legendre_map(const Lagrangian& Lg) {
  validate_atoms(Lg.L, Lg.domain, {}, "legendre_map");
  const Chart& W = Lg.domain;
  Chart CW = wedge_cotangent(2, Lg.base);
  const int m = Lg.base.dim();
  CoordMap pl{W, CW, {}};
  for (int i = 0; i < m; ++i)
    pl.entries[CW.coord(i).name] = sy::var(W.coord(i).name);
  for (int q = m; q < W.dim(); ++q)
    pl.entries[CW.coord(q).name] = sy::neg(sy::diff(Lg.L, W.coord(q).name));
  pl.validate();
  return pl;
}

SurfaceSystem euler_lagrange_residual(const Lagrangian& Lg) {
  validate_atoms(Lg.L, Lg.domain, {}, "euler_lagrange_residual");
  const Chart& W = Lg.domain;
  const int m = Lg.base.dim();
  PairTable pt = pair_table(W);

  std::map<AtomKey, Expr> jet;
  SurfaceSystem out;
  for (int mu = 0; mu < m; ++mu) {
    const std::string& nm = W.coord(mu).name;
    jet[{false, nm, {}}] = surface_var(nm);
    out.unknowns.push_back(nm);
  }
  for (size_t i = 0; i < pt.pairs.size(); ++i) {
    auto [a, b] = pt.pairs[i];
    const std::string &na = W.coord(a).name, &nb = W.coord(b).name;
    jet[{false, pt.names[i], {}}] =
        sy::sub(sy::mul(surface_d(na, "t"), surface_d(nb, "s")),
                sy::mul(surface_d(na, "s"), surface_d(nb, "t")));
  }

  for (int sigma = 0; sigma < m; ++sigma) {
    Expr res = sy::subst(sy::diff(Lg.L, W.coord(sigma).name), jet);
    for (int mu = 0; mu < m; ++mu) {
      if (mu == sigma) continue;
      Expr P = sy::subst(pair_partial(Lg.L, pt, mu, sigma), jet);
      const std::string& nm = W.coord(mu).name;
      res = sy::sub(res, sy::mul(surface_d(nm, "t"), sy::diff(P, "s")));
      res = sy::add(res, sy::mul(surface_d(nm, "s"), sy::diff(P, "t")));
    }
    out.residuals.push_back(res);
  }
  return out;
}

SurfaceSystem hamilton_surface_system(const Hamiltonian& Hm) {
  validate_atoms(Hm.H, Hm.domain, Hm.parameters, "hamilton_surface_system");
  const Chart& CW = Hm.domain;
  const int m = Hm.base.dim();
  PairTable pt = pair_table(CW);

  std::map<AtomKey, Expr> jet;
  SurfaceSystem out;
  for (int i = 0; i < CW.dim(); ++i) {
    const std::string& nm = CW.coord(i).name;
    jet[{false, nm, {}}] = surface_var(nm);
    out.unknowns.push_back(nm);
  }
  // signed momentum unknown p_{mu sigma} as a surface function
  auto pvar = [&](int mu, int sigma) -> Expr {
    for (size_t i = 0; i < pt.pairs.size(); ++i)
      if (pt.pairs[i] ==
          std::make_pair(std::min(mu, sigma), std::max(mu, sigma))) {
        Expr v = surface_var(pt.names[i]);
        return mu < sigma ? v : sy::neg(v);
      }
    return Expr();
  };

  for (size_t i = 0; i < pt.pairs.size(); ++i) {
    auto [a, b] = pt.pairs[i];
    const std::string &na = CW.coord(a).name, &nb = CW.coord(b).name;
    Expr bracket =
        sy::sub(sy::mul(surface_d(na, "t"), surface_d(nb, "s")),
                sy::mul(surface_d(na, "s"), surface_d(nb, "t")));
    out.pair_residuals.push_back(
        sy::sub(sy::subst(sy::diff(Hm.H, pt.names[i]), jet), bracket));
  }
  for (int sigma = 0; sigma < m; ++sigma) {
    Expr res = sy::neg(sy::subst(sy::diff(Hm.H, CW.coord(sigma).name), jet));
    for (int mu = 0; mu < m; ++mu) {
      if (mu == sigma) continue;
      Expr P = pvar(mu, sigma);
      const std::string& nm = CW.coord(mu).name;
      res = sy::sub(res, sy::mul(surface_d(nm, "t"), sy::diff(P, "s")));
      res = sy::add(res, sy::mul(surface_d(nm, "s"), sy::diff(P, "t")));
    }
    out.residuals.push_back(res);
  }
  return out;
}

Expr decomposability_residual(const Chart& base) {
  if (base.dim() != 4)
    throw std::invalid_argument(
        "decomposability_residual is the dimension-four Pluecker relation");
  Chart W = wedge_tangent(2, base);
  auto v = [&](int a, int b) {
    auto h = W.query("xd", {{a, b}});
    return W.v(h->pos);
  };
  return sy::add(sy::sub(sy::mul(v(1, 2), v(3, 4)), sy::mul(v(1, 3), v(2, 4))),
                 sy::mul(v(1, 4), v(2, 3)));
}

MinimalSurfaceReport el_vs_minimal_surface_consistency(unsigned seed,
                                                       int samples) {
  Chart M = base_chart(3);
  Lagrangian Lg = nambu_goto(M, euclidean_metric(3));
  SurfaceSystem el = euler_lagrange_residual(Lg);

  // graph surface x_1 = t, x_2 = s, x_3 = z(t, s): constant first
  // derivatives on the first two components, jet variables on the third
  std::map<AtomKey, Expr> graph;
  auto dkey = [](const std::string& nm, std::vector<std::string> o) {
    return AtomKey{true, nm, std::move(o)};
  };
  for (const char* nm : {"x_1", "x_2"}) {
    graph[dkey(nm, {"t"})] = sy::num(nm == std::string("x_1") ? 1 : 0);
    graph[dkey(nm, {"s"})] = sy::num(nm == std::string("x_1") ? 0 : 1);
    for (auto o : {std::vector<std::string>{"t", "t"},
                   std::vector<std::string>{"s", "t"},
                   std::vector<std::string>{"s", "s"}})
      graph[dkey(nm, o)] = sy::num(0);
  }
  graph[dkey("x_3", {"t"})] = sy::var("zx");
  graph[dkey("x_3", {"s"})] = sy::var("zy");
  graph[dkey("x_3", {"t", "t"})] = sy::var("zxx");
  graph[dkey("x_3", {"s", "t"})] = sy::var("zxy");
  graph[dkey("x_3", {"s", "s"})] = sy::var("zyy");

  Expr E[3];
  for (int k = 0; k < 3; ++k) E[k] = sy::subst(el.residuals[k], graph);

  Expr zx = sy::var("zx"), zy = sy::var("zy");
  Expr zxx = sy::var("zxx"), zxy = sy::var("zxy"), zyy = sy::var("zyy");
  Expr one = sy::num(1);
  Expr ms = sy::add(
      sy::sub(sy::mul(sy::add(one, sy::mul(zx, zx)), zyy),
              sy::mul(sy::num(2), sy::mul(zx, sy::mul(zy, zxy)))),
      sy::mul(sy::add(one, sy::mul(zy, zy)), zxx));

  MinimalSurfaceReport rep;
  rep.samples = samples;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  bool equiv = true;
  for (int it = 0; it < samples; ++it) {
    double jzx = U(rng), jzy = U(rng), jzxx = U(rng), jzxy = U(rng),
           jzyy = U(rng);
    sy::VarAssignment va;
    va.set("zx", jzx);
    va.set("zy", jzy);
    va.set("zxx", jzxx);
    va.set("zxy", jzxy);

    // constrained jet: solve the last entry from the minimal-surface equation
    double czyy = (2.0 * jzx * jzy * jzxy - (1.0 + jzy * jzy) * jzxx) /
                  (1.0 + jzx * jzx);
    va.set("zyy", czyy);
    rep.max_e1 = std::max(rep.max_e1, std::abs(sy::eval_double(E[0], va)));
    rep.max_e2 = std::max(rep.max_e2, std::abs(sy::eval_double(E[1], va)));
    rep.max_e3 = std::max(rep.max_e3, std::abs(sy::eval_double(E[2], va)));

    // free jet: the third residual is a fixed multiple of the
    // minimal-surface residual over rho^3
    va.set("zyy", jzyy);
    double e3 = sy::eval_double(E[2], va);
    double msv = sy::eval_double(ms, va);
    double rho2 = 1.0 + jzx * jzx + jzy * jzy;
    double expect = -msv / (rho2 * std::sqrt(rho2));
    double dev = std::abs(e3 - expect) / std::max(1.0, std::abs(expect));
    rep.max_ratio_dev = std::max(rep.max_ratio_dev, dev);
    if (dev > rep.tolerance) equiv = false;
  }
  rep.equivalence = equiv;
  return rep;
}

} // namespace wedge::geo
