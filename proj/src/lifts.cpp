#include "wedge/lifts.hpp"

#include <stdexcept>

namespace wedge::geo {

namespace {

long binomial(int m, int n) {
  if (n < 0 || n > m) return 0;
  long r = 1;
  for (int i = 1; i <= n; ++i) r = r * (m - n + i) / i;
  return r;
}

} // namespace

LiftContext make_lift(const Chart& base, int n) {
  if (n < 1) throw std::invalid_argument("lift order must be positive");
  Chart lifted = wedge_tangent(n, base);
  if (lifted.dim() != base.dim() + binomial(base.dim(), n))
    throw std::logic_error("prolongation has the wrong number of coordinates");
  CoordMap proj{lifted, base, {}};
  for (int i = 0; i < base.dim(); ++i)
    proj.entries[base.coord(i).name] = sym::var(base.coord(i).name);
  proj.validate();
  PolyField tau = tautological_field(lifted, n);
  return {base, n, std::move(lifted), std::move(proj), std::move(tau)};
}

Form iota_n(const LiftContext& ctx, const Form& phi) {
  if (!phi.chart().same_coords(ctx.base))
    throw std::invalid_argument("the form does not live on the lift base");
  if (phi.degree() < ctx.n) return Form(ctx.lifted, 0);
  Form out = contract(ctx.tau, on_chart(ctx.lifted, phi));
  if (out.degree() != phi.degree() - ctx.n)
    throw std::logic_error("iota_n degree bookkeeping failed");
  return out;
}

Form dT_n(const LiftContext& ctx, const Form& phi) {
  int sign = ctx.n % 2 == 0 ? -1 : 1;
  Form idphi = iota_n(ctx, exterior_d(phi));
  if (phi.degree() < ctx.n) // d(iota phi) vanishes, only the iota(d phi) term survives
    return idphi * sym::num(sign);
  Form out = exterior_d(iota_n(ctx, phi)) + idphi * sym::num(sign);
  if (out.degree() != phi.degree() - ctx.n + 1)
    throw std::logic_error("dT_n degree bookkeeping failed");
  return out;
}

Form liouville_form(const Chart& base, int k) {
  if (k < 1) throw std::invalid_argument("the Liouville form needs k >= 1");
  if (base.depth() != 0)
    throw std::invalid_argument("the Liouville form is built over a base manifold");
  return liouville_form(wedge_cotangent(k, base));
}

Form multisymplectic_form(const Chart& base, int k) {
  return exterior_d(liouville_form(base, k));
}

PairingResult vertical_quotient_pairing(const Form& delta, const Chart& E,
                                        const Chart& F) {
  Chart V = fiber_product(E, F);
  if (delta.degree() != 1 || !delta.chart().same_coords(V))
    throw std::invalid_argument(
        "the pairing expects a 1-form on the fiber product of the two bundles");
  int mb = V.base_dim();
  for (const auto& [k, c] : delta.stored())
    if (k[0] >= mb)
      throw std::invalid_argument("the pairing form must be semibasic");

  // bilinear in the two fiber blocks: fiberwise linear and homogeneous
  auto linear_in = [&](const Expr& c, int lo, int hi) {
    std::map<sym::AtomKey, Expr> zero;
    for (int p = lo; p < hi; ++p) {
      zero[sym::AtomKey{false, V.coord(p).name, {}}] = sym::num(0);
      for (int q = lo; q < hi; ++q)
        if (!sym::diff(sym::diff(c, V.coord(p).name), V.coord(q).name).is_zero())
          return false;
    }
    return sym::subst(c, zero).is_zero();
  };
  int split = mb + (E.dim() - E.base_dim());
  for (const auto& [k, c] : delta.stored())
    if (!linear_in(c, mb, split) || !linear_in(c, split, V.dim()))
      throw std::invalid_argument(
          "the pairing form must be bilinear in the fiber coordinates");

  LiftContext ctx = make_lift(V, 2);
  Expr value = dT_n(ctx, delta).at({});

  bool projects = true;
  for (const sym::AtomKey& a : sym::atoms(value)) {
    std::string name = sym::atom_name(a);
    if (!ctx.lifted.has(name)) continue;
    const Coordinate& c = ctx.lifted.coord(ctx.lifted.position(name));
    if (c.parents.size() == 2 && c.parents[0] >= mb && c.parents[1] >= mb)
      projects = false;
  }
  return {std::move(value), std::move(ctx.lifted), projects};
}

} // namespace wedge::geo
