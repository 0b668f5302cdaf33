#pragma once
#include "wedge/rational.hpp"
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Symbolic expression engine.
//
// Expressions are held in a unique canonical form:
//   * a Sum of >= 2 distinct monomial terms, sorted by a fixed total order,
//   * a single term: rational coefficient times powers of "bases",
//   * or a bare atom / rational constant.
// Exponents are stored as half-integers (hexp = 2 * exponent) so that
// sqrt(x) is x^(1/2) and sqrt(x)*x merges to x^(3/2) with no special cases.
// Bases are variables, derivative-of-unknown leaves, opaque radicands
// (rationals / monomials / sums under a square root), or sums with negative
// powers (denominators).  Products of sums are always expanded, rational
// constants always folded, like terms always merged — so structural equality
// of canonical forms is a sound and usually complete equality test; equal()
// adds a randomized numerical fallback for radical identities the canonical
// form does not see (e.g. sqrt(8) vs 2*sqrt(2)).

namespace wedge::sym {

class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Num, Var, Dif, Term, Sum };

struct Node;

class Expr {
public:
  Expr(); // 0
  explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  const Node& node() const { return *n_; }
  Kind kind() const;
  bool is_zero() const;
  bool is_one() const;
  bool is_num() const;
  Rational num_value() const; // requires kind()==Num

private:
  std::shared_ptr<const Node> n_;
};

// one multiplicative factor base^(hexp/2)
struct Factor {
  Expr base;
  int hexp; // twice the exponent; never 0
};

struct Node {
  Kind kind;
  Rational num;                    // Num payload / Term coefficient
  std::string name;                // Var, Dif
  std::vector<std::string> orders; // Dif: sorted multiset of d/d-variables
  std::vector<std::string> deps;   // Var/Dif metadata: declared arguments of an
                                   // unknown function (not part of identity)
  std::vector<Factor> factors;     // Term
  std::vector<Expr> terms;         // Sum
};

// identity of an atomic leaf (variable or derivative-of-unknown)
struct AtomKey {
  bool is_dif = false;
  std::string name;
  std::vector<std::string> orders;
  auto operator<=>(const AtomKey&) const = default;
};

// ---- constructors -----------------------------------------------------
Expr num(const Rational& r);
Expr num(long n);
Expr num(long n, long d);
Expr var(const std::string& name, std::vector<std::string> deps = {});
// derivative-of-unknown-function leaf, e.g. dif("z", {"x","y"}) = d2z/dxdy
Expr dif(const std::string& name, std::vector<std::string> orders,
         std::vector<std::string> deps = {});
Expr from_atom(const AtomKey& a, std::vector<std::string> deps = {});

// ---- algebra (canonicalizing) ------------------------------------------
Expr add(const Expr& a, const Expr& b);
Expr add_many(const std::vector<Expr>& es);
Expr sub(const Expr& a, const Expr& b);
Expr neg(const Expr& a);
Expr mul(const Expr& a, const Expr& b);
Expr mul_many(const std::vector<Expr>& es);
Expr div(const Expr& a, const Expr& b); // throws on division by exact zero
Expr pow(const Expr& a, long k);
Expr sqrt_(const Expr& a);

inline Expr operator+(const Expr& a, const Expr& b) { return add(a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul(a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }

// total order on canonical expressions: negative/0/positive like strcmp
int compare(const Expr& a, const Expr& b);
inline bool identical(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

// ---- calculus ----------------------------------------------------------
// Partial derivative with respect to an atomic leaf.  Other leaves are
// independent, except that a Var/Dif whose declared deps contain a plain
// variable w picks up a new derivative order in w (chain rule for unknown
// functions such as metric coefficients g_{mu nu}(x)).
Expr diff(const Expr& e, const AtomKey& wrt);
Expr diff(const Expr& e, const std::string& var_name);

// simultaneous substitution of atoms by expressions
Expr subst(const Expr& e, const std::map<AtomKey, Expr>& repl);

// ---- evaluation ----------------------------------------------------------
struct VarAssignment {
  std::map<std::string, Rational> exact;
  std::map<std::string, double> approx;
  void set(const std::string& name, const Rational& r) { exact[name] = r; }
  void set(const std::string& name, double d) { approx[name] = d; }
  // keys for Dif leaves use the printed form, e.g. "D(z;x,y)"
};

using EvalValue = std::variant<Rational, double>;
// Exact rational arithmetic throughout unless a non-perfect-square sqrt or a
// double-valued assignment forces a float (then rel. error <= 1e-14).
// Unbound variable or negative radicand -> EvalError.
EvalValue eval(const Expr& e, const VarAssignment& a);
double eval_double(const Expr& e, const VarAssignment& a);

// ---- queries ------------------------------------------------------------
void collect_atoms(const Expr& e, std::set<AtomKey>& out);
std::set<AtomKey> atoms(const Expr& e);
// canonical printed name of an atom ("p_12", "D(z;x,y)") — used as
// VarAssignment key for Dif leaves
std::string atom_name(const AtomKey& a);

// Rewrite e as sum over monomials in the given atoms: key = canonical factor
// list over `wrt` (sorted (atom, hexp) pairs, hexp = 2*exponent), value =
// coefficient expression free of `wrt` atoms.  Requires e polynomial in wrt
// (no wrt atom under a radical or in a denominator sum).
using MonoKey = std::vector<std::pair<AtomKey, int>>;
std::map<MonoKey, Expr> collect(const Expr& e, const std::set<AtomKey>& wrt);

// is e a polynomial in the given atoms with all monomial degrees <= deg?
bool polynomial_in(const Expr& e, const std::set<AtomKey>& wrt, int max_deg);

// ---- equality ------------------------------------------------------------
// canonical-form identity, with a deterministic randomized numerical
// fallback: 32 random rational sample points (resampled on sqrt-domain
// violations), equal iff |a-b| <= 1e-10 * max(1,|a|,|b|) at every point
bool equal(const Expr& a, const Expr& b, unsigned seed = 0xC0FFEEu);

// ---- printing -------------------------------------------------------------
// deterministic canonical text; parse(to_string(e)) == e
std::string to_string(const Expr& e);

} // namespace wedge::sym
