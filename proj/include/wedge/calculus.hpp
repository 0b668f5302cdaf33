#pragma once

// Exterior calculus over a Chart.
//
// Forms and polyvector fields store one coefficient per strictly increasing
// tuple of coordinate positions; components for arbitrary index orders are
// views obtained by sign extension.  The pairing of a stored q-vector with a
// stored q-form is the determinant pairing, normalized so that
// contract(dx/\dy-vector, dx/\dy-form) = 1 with no combinatorial factor.

#include <map>
#include <string>
#include <vector>

#include "wedge/chart.hpp"
#include "wedge/expr.hpp"

namespace wedge::geo {

using sym::Expr;

namespace detail {
// sign of the permutation sorting v (0 when an entry repeats); v is sorted
int sort_sign(std::vector<int>& v);
} // namespace detail

class Form {
 public:
  Form() = default;
  Form(Chart chart, int degree);

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }

  // add to the component at an arbitrary-order tuple (sign-extended)
  void add_term(std::vector<int> tuple, const Expr& c);
  // component at an arbitrary-order tuple (zero when not stored)
  Expr at(std::vector<int> tuple) const;
  const std::map<std::vector<int>, Expr>& stored() const { return coeff_; }
  bool is_zero() const { return coeff_.empty(); }

  Form operator+(const Form& o) const;
  Form operator-(const Form& o) const;
  Form operator*(const Expr& s) const;
  bool identical_to(const Form& o) const; // canonical coefficient equality

  std::string str() const;
  std::string latex() const;

 private:
  Chart chart_;
  int degree_ = 0;
  std::map<std::vector<int>, Expr> coeff_;
  friend class PolyField;
};

class PolyField {
 public:
  PolyField() = default;
  PolyField(Chart chart, int degree);

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }

  void add_term(std::vector<int> tuple, const Expr& c);
  Expr at(std::vector<int> tuple) const;
  const std::map<std::vector<int>, Expr>& stored() const { return coeff_; }
  bool is_zero() const { return coeff_.empty(); }

  PolyField operator+(const PolyField& o) const;
  PolyField operator-(const PolyField& o) const;
  PolyField operator*(const Expr& s) const;
  bool identical_to(const PolyField& o) const;

  std::string str() const;

 private:
  Chart chart_;
  int degree_ = 0;
  std::map<std::vector<int>, Expr> coeff_;
};

// d of a function (degree-1 form)
Form exterior_d(const Chart& c, const Expr& f);
Form exterior_d(const Form& a);
Form wedge(const Form& a, const Form& b);
PolyField wedge(const PolyField& a, const PolyField& b);

// interior product: the q-vector fills the first q slots of the p-form
Form contract(const PolyField& u, const Form& a);

// commutator of two vector fields (degree-1 polyfields)
PolyField lie_bracket(const PolyField& x, const PolyField& y);

// Euler-type field of the chosen grading: sum of d_i(c) * c * d/dc
PolyField weight_field(const Chart& c, int selector);

// a smooth map written in coordinates: one expression per target coordinate,
// in the source chart's coordinates
struct CoordMap {
  Chart source;
  Chart target;
  std::map<std::string, Expr> entries;

  const Expr& entry(const std::string& target_coord) const;
  // substitute target coordinates by their expressions
  Expr apply(const Expr& e_on_target) const;
  void validate() const; // every target coordinate has an entry
};

CoordMap identity_map(const Chart& c);
CoordMap compose(const CoordMap& f, const CoordMap& g); // f after g

Form pullback(const CoordMap& psi, const Form& a);

// pushforward of a polyvector along psi by Jacobian minors; the returned
// coefficients remain expressions in the source coordinates
PolyField pushforward_field(const CoordMap& psi, const PolyField& x);

// the /\nT prolongation of a map between base charts (or bundles): base
// entries are copied, each target wedge fiber is the sum of n x n Jacobian
// minors times the matching source wedge fiber
CoordMap lift_coord_map(const CoordMap& psi, int n);

// reinterpret a form/field on a chart that extends the original one (the
// original coordinates must be a prefix of the big chart)
Form on_chart(const Chart& big, const Form& a);
PolyField on_chart(const Chart& big, const PolyField& x);

// tautological n-vector on a /\nT chart: each wedge fiber coordinate sits on
// its parent tuple
PolyField tautological_field(const Chart& lifted, int n);

// Liouville form on a T* chart (or /\nT* chart): sum of fiber coordinates
// times d of their parents; for /\nT* the parent tuple contributes the
// wedge of base differentials, giving an n-form
Form liouville_form(const Chart& c);
// d of the Liouville form
Form canonical_symplectic(const Chart& c);

} // namespace wedge::geo
