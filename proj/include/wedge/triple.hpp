#pragma once

// The three canonical morphisms tying the bundles of n-vectors together:
//
//   kappa_n : /\^n T T M   -> T /\^n T M     (flip, built from T/\^n o (kappa x ... x kappa))
//   alpha_n : /\^n T /\^n T* M -> T* /\^n T M   (dual of the converse of kappa_n)
//   beta_n  : /\^n T /\^n T* M -> T* /\^n T* M  (u |-> iota_u of the multisymplectic form)
//
// kappa_n is derived, not hand-written: both sides are evaluated on a generic
// decomposable n-vector and the coordinate formula is recovered by matching
// minor expansions.  alpha_n is solved from the duality equation
// <alpha_n(u), kappa_n(w)> = dT_n Delta_n (u, w), where Delta_n is the
// contraction pairing TM x_M /\^n T* M -> /\^(n-1) T* M.  beta_n reads its
// entries off iota_n of the multisymplectic (n+1)-form.

#include <string>
#include <vector>

#include "wedge/lifts.hpp"

namespace wedge::geo {

// base must be a plain manifold chart (depth 0), n >= 1
CoordMap kappa_n(const Chart& base, int n);
CoordMap alpha_n(const Chart& base, int n);
CoordMap beta_n(const Chart& base, int n);

// f . g^{-1} for two maps sharing a source whose entries are affine in the
// source coordinates with rational coefficients.  Throws std::runtime_error
// ("relation composition is not a map") when some entry of f fails to be
// constant on the fibers of g.
CoordMap compose_through_inverse(const CoordMap& f, const CoordMap& g);

// the linear parts of the two maps span the same space of functionals on
// their common source, i.e. the level sets coincide
bool same_level_sets(const CoordMap& a, const CoordMap& b);

// symbolic verification that alpha_n and beta_n transport the canonical
// structures onto the same presymplectic lift:
//   alpha_n^* omega_{/\^n T M}  = dT_n omega^n      (and the theta-level
//   alpha_n^* theta = (-1)^(n+1) dT_n theta^n, the sign forced by
//   d o dT_n = -(-1)^n dT_n o d),
//   beta_n^*  omega_{/\^n T* M} = dT_n omega^n,
//   beta_n^*  theta             = iota_n omega^n.
struct TripleReport {
  bool alpha_symplectic = false;
  bool beta_symplectic = false;
  bool alpha_liouville = false;
  bool beta_liouville = false;
  std::vector<std::string> mismatches; // differing coefficients, if any
  bool pass() const {
    return alpha_symplectic && beta_symplectic && alpha_liouville &&
           beta_liouville;
  }
};
TripleReport verify_triple(const Chart& base, int n);

// structural checks on the kernel of kappa_2: the output never involves the
// double-dotted z-block, a symmetric y-block is annihilated, an
// antisymmetric one is doubled, and a rank-one block u (x) w maps to the
// wedge u /\ w
struct KappaKernelReport {
  bool z_independent = false;
  bool symmetric_vanishes = false;
  bool antisymmetric_doubles = false;
  bool tensor_to_wedge = false;
  bool pass() const {
    return z_independent && symmetric_vanishes && antisymmetric_doubles &&
           tensor_to_wedge;
  }
};
KappaKernelReport kernel_witness_kappa(const Chart& base);

} // namespace wedge::geo
