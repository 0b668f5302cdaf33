#pragma once

// Lifts of differential forms to bundles of n-vectors.
//
// iota_n sends a p-form on N to a (p-n)-form on /\^n T N by feeding the
// tautological n-vector into the first n slots and pushing the remaining
// arguments down along the bundle projection.  dT_n is its graded commutator
// with the exterior derivative,
//
//     dT_n = d . iota_n - (-1)^n iota_n . d,
//
// which for n = 1 is the classical complete lift (total derivative) on T N.
// Both operators land on the chart produced by wedge_tangent(n, base).

#include "wedge/calculus.hpp"

namespace wedge::geo {

// a base chart together with its n-vector prolongation and projection data
struct LiftContext {
  Chart base;      // N
  int n;           // lift order
  Chart lifted;    // /\^n T N
  CoordMap proj;   // bundle projection /\^n T N -> N
  PolyField tau;   // tautological n-vector field on the lifted chart
};

LiftContext make_lift(const Chart& base, int n);

// degree -n lift; returns the zero 0-form when deg phi < n
Form iota_n(const LiftContext& ctx, const Form& phi);

// graded commutator [d, iota_n]; lowers the degree by n - 1
Form dT_n(const LiftContext& ctx, const Form& phi);

// Liouville k-form theta^k on /\^k T* M (one stored coefficient p_I per
// increasing tuple) and the multisymplectic (k+1)-form d theta^k
Form liouville_form(const Chart& base, int k);
Form multisymplectic_form(const Chart& base, int k);

// dT^2 of a semibasic fiber-bilinear 1-form delta on a product bundle
// E x_M F.  The value is a function on /\^2 T(E x_M F); the flag reports
// that it involves no double-vertical coordinate (both parents in a fiber),
// so it descends to the quotients by the double-vertical subbundles.
struct PairingResult {
  sym::Expr value;
  Chart chart; // /\^2 T(E x_M F)
  bool projects_to_quotient;
};
PairingResult vertical_quotient_pairing(const Form& delta, const Chart& E,
                                        const Chart& F);

} // namespace wedge::geo
