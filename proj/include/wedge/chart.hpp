#pragma once

// Coordinate charts for iterated bundle functors.
//
// A Chart is an ordered list of named coordinates.  Applying a functor
// (T, T*, /\nT, /\nT*) keeps the input coordinates as a prefix and appends
// fiber coordinates; every fiber coordinate remembers the positions of the
// coordinates it was built from ("parents"), so tautological objects and
// prolongations can be constructed without re-deriving index bookkeeping.
//
// Naming scheme (ASCII):  name = head + index groups.  A '_' group is
// label/covector-like, a '^' group vector-like; '_' groups print before '^'
// groups.  Indices are single digits 1..9, so the base dimension is capped
// at 9.  The conventions, chosen so that the classical charts come out with
// their textbook names:
//   T:    per-family head + 'd' (fallback head + 'p' when taken); dotting a
//         base label flips it to '^' case, fiber coordinates keep case.
//         TM = (x, xd), TTM = (x, xd, xp, xdd).
//   T*:   conjugate to a base label gets head p (fallback f) keeping '_';
//         conjugate to a fiber flips case with head from the table
//         e->pi, xi->phi, xd->f, p->q.  T*E = (x, e, p, pi).
//   /\nT: one fiber per increasing n-tuple of input coordinates.  The tuple
//         splits into runs by family; each run of single-digit parents merges
//         into one group, multi-digit parents keep their groups verbatim.
//         Heads by run signature: all base -> xd, one undotted fiber family
//         -> head+'d', one dotted fiber family -> z, base + one fiber family
//         -> y, anything else -> v.  Collisions (same head and same group
//         shape already present) walk a fallback chain.
//   /\nT*: base chart only; fiber p_I per increasing n-tuple of base labels.
//
// Each coordinate carries a bidegree (d1, d2): the first functor application
// gives its fibers (0,1); a second /\nT or T gives (1, sum of parents' d2),
// a second T* gives (1, 1 - d2 of the conjugate partner).  Nesting deeper
// than two functor layers is rejected.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wedge/expr.hpp"
#include "wedge/parse.hpp"

namespace wedge::geo {

using sym::Expr;

// a range of index groups [begin, end) that is antisymmetric under swapping
// adjacent chunks of `chunk` groups (one chunk per wedge factor)
struct SwapRun {
  int begin = 0;
  int end = 0;
  int chunk = 1;
};

struct Coordinate {
  std::string name;                    // canonical ASCII name
  std::string head;                    // leading letters of the name
  std::vector<sym::IndexGroup> groups; // index groups, in printed order
  int d1 = 0, d2 = 0;                  // bidegree
  std::vector<int> parents;            // positions in the same chart
  std::vector<SwapRun> swap_runs;
};

class Chart {
 public:
  Chart() = default;

  const std::string& label() const;
  int dim() const;        // number of coordinates
  int base_dim() const;   // number of depth-0 coordinates (the base block)
  int depth() const;      // functor nesting level (0, 1 or 2)

  const std::vector<Coordinate>& coords() const;
  const Coordinate& coord(int pos) const;
  int position(const std::string& name) const; // -1 when absent
  bool has(const std::string& name) const;
  Expr v(int pos) const;                       // the coordinate as an Expr

  // look up a coordinate by head and (arbitrary-order) index digits; the
  // returned sign normalizes the spelled order to the stored one, 0 when a
  // repeated index kills the component
  struct Hit {
    int pos;
    int sign;
  };
  std::optional<Hit> query(const std::string& head,
                           const std::vector<std::vector<int>>& digits) const;

  // positions of a family's members (all coordinates sharing head + shape
  // with the named one); base families of one coordinate give one position
  std::vector<int> family_of(int pos) const;

  // parser hook: resolves chart coordinates, normalizing index order
  sym::SymbolResolver resolver() const;
  Expr parse(const std::string& text) const;

  // variable atoms appearing in e that are not coordinates of this chart
  std::vector<std::string> foreign_atoms(const Expr& e) const;

  bool same_coords(const Chart& other) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit Chart(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  friend Chart base_chart(const std::vector<std::string>& names,
                          const std::string& label);
  friend Chart bundle_chart(int m, int k, const std::string& fiber_head,
                            char fiber_sep);
  friend Chart bundle_chart(int m, const std::vector<std::string>& fiber_labels);
  friend Chart fiber_product(const Chart& a, const Chart& b);
  friend Chart tangent(const Chart& c);
  friend Chart cotangent(const Chart& c);
  friend Chart wedge_tangent(int n, const Chart& c);
  friend Chart wedge_cotangent(int n, const Chart& c);
  friend Chart truncate_degree(const Chart& c, int maxdeg);
};

// base manifold chart with explicit labels (labels without digits are
// allowed; wedge fibers over them number the positions instead)
Chart base_chart(const std::vector<std::string>& names,
                 const std::string& label = "M");
// x_1 .. x_m
Chart base_chart(int m);
// bundle E = (x_1..x_m ; e^1..e^k); the fiber head and case are configurable
// so dual-type bundles (xi_a) can be declared
Chart bundle_chart(int m, int k, const std::string& fiber_head = "e",
                   char fiber_sep = '^');
// bundle with explicit fiber labels, e.g. tensor-type fibers f_1_2 carrying
// one index per group
Chart bundle_chart(int m, const std::vector<std::string>& fiber_labels);
// product over a shared base block: (base; fibers of a; fibers of b)
Chart fiber_product(const Chart& a, const Chart& b);

Chart tangent(const Chart& c);
Chart cotangent(const Chart& c);
Chart wedge_tangent(int n, const Chart& c);
Chart wedge_cotangent(int n, const Chart& c);

// drop fiber coordinates of second degree > maxdeg
Chart truncate_degree(const Chart& c, int maxdeg);

} // namespace wedge::geo
