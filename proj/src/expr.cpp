#include "wedge/expr.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

namespace wedge::sym {

// ===========================================================================
// node construction helpers
// ===========================================================================
namespace {

Expr wrap(Node&& n) { return Expr(std::make_shared<const Node>(std::move(n))); }

Expr mk_num(const Rational& r) {
  Node n;
  n.kind = Kind::Num;
  n.num = r;
  return wrap(std::move(n));
}

std::shared_ptr<const Node> zero_node() {
  static const std::shared_ptr<const Node> z = [] {
    Node n;
    n.kind = Kind::Num;
    n.num = Rational(0);
    return std::make_shared<const Node>(std::move(n));
  }();
  return z;
}

int cmp_int(long a, long b) { return a < b ? -1 : (a > b ? 1 : 0); }

int cmp_strvec(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  size_t k = std::min(a.size(), b.size());
  for (size_t i = 0; i < k; ++i)
    if (int c = a[i].compare(b[i]); c != 0) return c < 0 ? -1 : 1;
  return cmp_int((long)a.size(), (long)b.size());
}

int kind_rank(Kind k) {
  switch (k) {
    case Kind::Num: return 0;
    case Kind::Var: return 1;
    case Kind::Dif: return 2;
    case Kind::Term: return 3;
    case Kind::Sum: return 4;
  }
  return 5;
}

int cmp_factors(const std::vector<Factor>& a, const std::vector<Factor>& b);

int cmp_expr(const Expr& ea, const Expr& eb) {
  const Node& a = ea.node();
  const Node& b = eb.node();
  if (int c = cmp_int(kind_rank(a.kind), kind_rank(b.kind)); c != 0) return c;
  switch (a.kind) {
    case Kind::Num:
      return a.num.cmp(b.num);
    case Kind::Var:
      return a.name.compare(b.name) < 0 ? -1 : (a.name == b.name ? 0 : 1);
    case Kind::Dif: {
      if (int c = a.name.compare(b.name); c != 0) return c < 0 ? -1 : 1;
      return cmp_strvec(a.orders, b.orders);
    }
    case Kind::Term: {
      if (int c = cmp_factors(a.factors, b.factors); c != 0) return c;
      return a.num.cmp(b.num);
    }
    case Kind::Sum: {
      size_t k = std::min(a.terms.size(), b.terms.size());
      for (size_t i = 0; i < k; ++i)
        if (int c = cmp_expr(a.terms[i], b.terms[i]); c != 0) return c;
      return cmp_int((long)a.terms.size(), (long)b.terms.size());
    }
  }
  return 0;
}

int cmp_factors(const std::vector<Factor>& a, const std::vector<Factor>& b) {
  size_t k = std::min(a.size(), b.size());
  for (size_t i = 0; i < k; ++i) {
    if (int c = cmp_expr(a[i].base, b[i].base); c != 0) return c;
    if (int c = cmp_int(a[i].hexp, b[i].hexp); c != 0) return c;
  }
  return cmp_int((long)a.size(), (long)b.size());
}

bool is_atom_kind(Kind k) { return k == Kind::Var || k == Kind::Dif; }

// (coefficient, factor list) view of a monomial expression
void term_parts(const Expr& e, Rational& coeff, std::vector<Factor>& factors) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
      coeff = n.num;
      factors.clear();
      return;
    case Kind::Var:
    case Kind::Dif:
      coeff = Rational(1);
      factors = {Factor{e, 2}};
      return;
    case Kind::Term:
      coeff = n.num;
      factors = n.factors;
      return;
    case Kind::Sum:
      throw std::logic_error("term_parts on a sum");
  }
}

// content of a canonical sum: positive gcd of term coefficients; with
// `signed_content` the sign of the leading term is pulled out as well so the
// remaining sum has a positive leading coefficient
Rational sum_content(const Node& sum, bool signed_content) {
  mpz_class g = 0, l = 1;
  Rational lead_coeff(1);
  bool first = true;
  for (const Expr& t : sum.terms) {
    Rational c;
    std::vector<Factor> f;
    term_parts(t, c, f);
    if (first) {
      lead_coeff = c;
      first = false;
    }
    mpz_class num = c.raw().get_num(), den = c.raw().get_den();
    // gcd of rationals p/q: gcd of numerators scaled to common denominator,
    // tracked incrementally as gcd(num)/lcm(den)
    mpz_class t1;
    mpz_gcd(t1.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
    g = t1;
    mpz_lcm(t1.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
    l = t1;
  }
  if (g == 0) return Rational(1);
  mpq_class q(g, l);
  q.canonicalize();
  Rational content{Rational(q)};
  if (signed_content && lead_coeff.is_negative()) content = -content;
  return content;
}

// Base-wise minimum of half-exponents across every term of a canonical sum
// (absent counts as 0); the nonzero entries form the common monomial factor.
// A negative entry means every term is divided by that base, so pulling it
// out clears the shared denominator.
std::vector<Factor> common_monomial(const Node& sum) {
  std::vector<Factor> acc;
  bool first = true;
  for (const Expr& t : sum.terms) {
    Rational c;
    std::vector<Factor> f;
    term_parts(t, c, f);
    if (first) {
      acc = std::move(f);
      first = false;
      continue;
    }
    std::vector<Factor> next;
    size_t i = 0, j = 0;
    while (i < acc.size() && j < f.size()) {
      int cb = cmp_expr(acc[i].base, f[j].base);
      if (cb < 0) {
        if (acc[i].hexp < 0) next.push_back(acc[i]);
        ++i;
      } else if (cb > 0) {
        if (f[j].hexp < 0) next.push_back(f[j]);
        ++j;
      } else {
        int h = std::min(acc[i].hexp, f[j].hexp);
        if (h != 0) next.push_back(Factor{acc[i].base, h});
        ++i, ++j;
      }
    }
    for (; i < acc.size(); ++i)
      if (acc[i].hexp < 0) next.push_back(acc[i]);
    for (; j < f.size(); ++j)
      if (f[j].hexp < 0) next.push_back(f[j]);
    acc = std::move(next);
    if (acc.empty()) break;
  }
  return acc;
}

// divide a sorted factor list by a common monomial (entries absent from the
// list enter with the opposite sign)
void divide_out(std::vector<Factor>& f, const std::vector<Factor>& common) {
  std::vector<Factor> r;
  size_t i = 0, j = 0;
  while (i < f.size() || j < common.size()) {
    if (i == f.size()) {
      r.push_back(Factor{common[j].base, -common[j].hexp});
      ++j;
      continue;
    }
    if (j == common.size()) {
      r.push_back(f[i]);
      ++i;
      continue;
    }
    int cb = cmp_expr(f[i].base, common[j].base);
    if (cb < 0) {
      r.push_back(f[i]);
      ++i;
    } else if (cb > 0) {
      r.push_back(Factor{common[j].base, -common[j].hexp});
      ++j;
    } else {
      int h = f[i].hexp - common[j].hexp;
      if (h != 0) r.push_back(Factor{f[i].base, h});
      ++i, ++j;
    }
  }
  f = std::move(r);
}

Expr build_term(const Rational& coeff, std::vector<Factor>&& factors) {
  if (coeff.is_zero()) return mk_num(Rational(0));
  if (factors.empty()) return mk_num(coeff);
  if (coeff.is_one() && factors.size() == 1 && factors[0].hexp == 2 &&
      is_atom_kind(factors[0].base.kind()))
    return factors[0].base;
  Node n;
  n.kind = Kind::Term;
  n.num = coeff;
  n.factors = std::move(factors);
  return wrap(std::move(n));
}

Expr normalize_term(Rational coeff, std::vector<Factor> in);

// ===========================================================================
// canonicalizing algebra
// ===========================================================================

Expr add_many_impl(const std::vector<Expr>& es) {
  struct Key {
    std::vector<Factor> f;
    bool operator<(const Key& o) const { return cmp_factors(f, o.f) < 0; }
  };
  std::map<Key, Rational> acc;
  std::vector<const Expr*> stack;
  for (const Expr& e : es) {
    const Node& n = e.node();
    if (n.kind == Kind::Sum) {
      for (const Expr& t : n.terms) {
        Rational c;
        std::vector<Factor> f;
        term_parts(t, c, f);
        acc[Key{std::move(f)}] += c;
      }
    } else if (!e.is_zero()) {
      Rational c;
      std::vector<Factor> f;
      term_parts(e, c, f);
      acc[Key{std::move(f)}] += c;
    }
  }
  (void)stack;
  std::vector<Expr> terms;
  terms.reserve(acc.size());
  for (auto& [k, c] : acc) {
    if (c.is_zero()) continue;
    std::vector<Factor> f = k.f;
    terms.push_back(build_term(c, std::move(f)));
  }
  if (terms.empty()) return mk_num(Rational(0));
  if (terms.size() == 1) return terms[0];
  Node n;
  n.kind = Kind::Sum;
  n.terms = std::move(terms);
  return wrap(std::move(n));
}

Expr mul_impl(const Expr& a, const Expr& b);

Expr pow_impl(const Expr& e, long k) {
  if (k == 0) return mk_num(Rational(1));
  if (k == 1) return e;
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
      return mk_num(n.num.pow(k));
    case Kind::Var:
    case Kind::Dif:
      return normalize_term(Rational(1), {Factor{e, (int)(2 * k)}});
    case Kind::Term: {
      std::vector<Factor> f = n.factors;
      for (Factor& x : f) x.hexp = (int)(x.hexp * k);
      return normalize_term(n.num.pow(k), std::move(f));
    }
    case Kind::Sum: {
      if (k > 0) {
        Expr r = e;
        for (long i = 1; i < k; ++i) r = mul_impl(r, e);
        return r;
      }
      return normalize_term(Rational(1), {Factor{e, (int)(2 * k)}});
    }
  }
  return mk_num(Rational(0));
}

// Canonicalize a raw (coefficient, factor list) product.  Sorts and merges
// factors, folds rational bases (all constant radicals are merged into one
// sqrt of a single integer), extracts sum/radicand content, and splices
// integer powers of sums back through multiplication.
Expr normalize_term(Rational coeff, std::vector<Factor> in) {
  if (coeff.is_zero()) return mk_num(Rational(0));
  Rational radicand(1); // accumulated constant under one radical
  std::vector<Expr> pending; // spliced-out exact multiplicands
  for (;;) {
    std::sort(in.begin(), in.end(), [](const Factor& x, const Factor& y) {
      if (int c = cmp_expr(x.base, y.base); c != 0) return c < 0;
      return x.hexp < y.hexp;
    });
    std::vector<Factor> merged;
    for (const Factor& f : in) {
      if (!merged.empty() && cmp_expr(merged.back().base, f.base) == 0)
        merged.back().hexp += f.hexp;
      else
        merged.push_back(f);
    }
    // An even power of a sum equals the even power of its negation, but the
    // base under an odd (radical-bearing) power is rigid: no sign crosses a
    // real sqrt.  So when both A and -A occur as bases, rebase the even
    // factor onto the odd one and fold (-1)^k into the coefficient;
    // otherwise u/A/sqrt(A) and u*A^(-3/2) would normalize differently
    // whenever A's leading coefficient is negative.
    bool rebased = false;
    for (Factor& f : merged) {
      if (f.hexp % 2 != 0 || f.base.node().kind != Kind::Sum) continue;
      Expr nb = mul_impl(mk_num(Rational(-1)), f.base);
      for (const Factor& g : merged) {
        if (g.hexp % 2 == 0 || g.base.node().kind != Kind::Sum) continue;
        if (cmp_expr(g.base, nb) == 0) {
          if ((f.hexp / 2) % 2 != 0) coeff = -coeff;
          f.base = g.base;
          rebased = true;
          break;
        }
      }
    }
    if (rebased) {
      in = std::move(merged);
      continue; // re-sort and merge the now-shared bases
    }
    std::vector<Factor> out;
    std::vector<Factor> requeue;
    for (Factor& f : merged) {
      if (f.hexp == 0) continue;
      const Node& bn = f.base.node();
      switch (bn.kind) {
        case Kind::Num: {
          const Rational& r = bn.num;
          if (r.is_zero()) {
            if (f.hexp > 0) return mk_num(Rational(0));
            throw std::domain_error("division by zero expression");
          }
          int s = f.hexp % 2; // in C++, sign follows the dividend
          long k = (f.hexp - s) / 2;
          if (k != 0) coeff *= r.pow(k);
          if (s > 0) radicand *= r;
          if (s < 0) radicand *= Rational(1) / r;
          break;
        }
        case Kind::Var:
        case Kind::Dif:
          out.push_back(f);
          break;
        case Kind::Term: {
          // radical base (hexp is +-1 by construction; splice off any whole
          // power first).  Pulling pieces out of a radical is done only when
          // sound over the radicand's real domain:
          //   sqrt(c*B)      = sqrt(c)*sqrt(B) for constant c > 0
          //   sqrt(A^(2k+1)) = A^k sqrt(A)        (domain forces A >= 0)
          //   sqrt(A^(4k+r)) = A^(2k) sqrt(A^r)   (A^(2k) is non-negative)
          // but never sqrt(A^2) -> A (that would drop |.|) and never
          // sqrt(A*B) -> sqrt(A)sqrt(B) for two symbolic factors.
          int s = f.hexp % 2;
          long k = (f.hexp - s) / 2;
          if (k != 0) pending.push_back(pow_impl(f.base, k));
          if (s == 0) break;
          Rational c = bn.num;
          Rational ac = c.abs();
          if (!ac.is_one()) {
            requeue.push_back(Factor{mk_num(ac), s});
            std::vector<Factor> inner = bn.factors;
            requeue.push_back(
                Factor{build_term(c.is_negative() ? Rational(-1) : Rational(1),
                                  std::move(inner)),
                       s});
            break;
          }
          if (!c.is_negative() && bn.factors.size() == 1 &&
              bn.factors[0].hexp % 2 == 0) {
            long e = bn.factors[0].hexp / 2; // true exponent of the radicand
            long pull = (e % 2 != 0) ? (e - 1) / 2 : 2 * (e / 4);
            if (pull > 0) {
              requeue.push_back(Factor{bn.factors[0].base, (int)(2 * pull * s)});
              long rem = e - 2 * pull;
              if (rem > 0)
                requeue.push_back(
                    Factor{build_term(Rational(1),
                                      {Factor{bn.factors[0].base, (int)(2 * rem)}}),
                           s});
              break;
            }
          }
          out.push_back(Factor{f.base, s});
          break;
        }
        case Kind::Sum: {
          int s = f.hexp % 2;
          Rational content = sum_content(bn, /*signed=*/s == 0);
          if (!content.is_one()) {
            // pull content through: (c*A')^h -> c^h * A'^h
            std::vector<Expr> scaled;
            Rational inv = Rational(1) / content;
            for (const Expr& t : bn.terms) {
              Rational tc;
              std::vector<Factor> ff;
              term_parts(t, tc, ff);
              scaled.push_back(build_term(tc * inv, std::move(ff)));
            }
            requeue.push_back(Factor{mk_num(content), f.hexp});
            requeue.push_back(Factor{add_many_impl(scaled), f.hexp});
            break;
          }
          if (s == 0) {
            if (f.hexp > 0)
              pending.push_back(pow_impl(f.base, f.hexp / 2));
            else if (f.hexp == -2)
              out.push_back(f);
            else
              // keep denominators expanded: 1/(a+b)^2 and (1/(a+b))^2
              // must land on the same node
              requeue.push_back(Factor{pow_impl(f.base, -f.hexp / 2), -2});
          } else if (f.hexp > 1) {
            pending.push_back(pow_impl(f.base, (f.hexp - 1) / 2));
            out.push_back(Factor{f.base, 1});
          } else if (f.hexp < -3) {
            // mirror the positive split: A^(-(2k+1)/2) = A^(-k)/sqrt(A) with
            // the whole power expanded like every other denominator, so the
            // derivative rule and a re-parse land on the same node (a parsed
            // 1/(A)^k can only arrive expanded)
            requeue.push_back(Factor{pow_impl(f.base, (-f.hexp - 1) / 2), -2});
            out.push_back(Factor{f.base, -1});
          } else {
            out.push_back(f); // hexp 1, -1 or -3: keep whole
          }
          break;
        }
      }
      if (coeff.is_zero()) return mk_num(Rational(0));
    }
    if (!requeue.empty()) {
      for (Factor& f : requeue) out.push_back(std::move(f));
      in = std::move(out);
      continue; // re-sort and merge
    }
    if (!radicand.is_one()) {
      // sqrt(p/q) = sqrt(p*q)/q keeps a single integer radicand
      mpz_class p = radicand.raw().get_num(), q = radicand.raw().get_den();
      Rational flat{Rational(mpq_class(p * q))};
      coeff *= Rational(mpq_class(1, q));
      if (auto root = flat.exact_sqrt())
        coeff *= *root;
      else
        out.push_back(Factor{mk_num(flat), 1});
    }
    std::sort(out.begin(), out.end(), [](const Factor& x, const Factor& y) {
      if (int c = cmp_expr(x.base, y.base); c != 0) return c < 0;
      return x.hexp < y.hexp;
    });
    Expr base = build_term(coeff, std::move(out));
    Expr r = base;
    for (const Expr& p : pending) r = mul_impl(r, p);
    return r;
  }
}

Expr mul_impl(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return mk_num(Rational(0));
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  const Node& na = a.node();
  const Node& nb = b.node();
  if (na.kind == Kind::Sum || nb.kind == Kind::Sum) {
    std::vector<Expr> ta = (na.kind == Kind::Sum) ? na.terms : std::vector<Expr>{a};
    std::vector<Expr> tb = (nb.kind == Kind::Sum) ? nb.terms : std::vector<Expr>{b};
    std::vector<Expr> prods;
    prods.reserve(ta.size() * tb.size());
    for (const Expr& x : ta)
      for (const Expr& y : tb) prods.push_back(mul_impl(x, y));
    return add_many_impl(prods);
  }
  Rational ca, cb;
  std::vector<Factor> fa, fb;
  term_parts(a, ca, fa);
  term_parts(b, cb, fb);
  for (Factor& f : fb) fa.push_back(std::move(f));
  return normalize_term(ca * cb, std::move(fa));
}

} // namespace

// ===========================================================================
// public surface
// ===========================================================================

Expr::Expr() : n_(zero_node()) {}
Kind Expr::kind() const { return n_->kind; }
bool Expr::is_zero() const { return n_->kind == Kind::Num && n_->num.is_zero(); }
bool Expr::is_one() const { return n_->kind == Kind::Num && n_->num.is_one(); }
bool Expr::is_num() const { return n_->kind == Kind::Num; }
Rational Expr::num_value() const {
  if (n_->kind != Kind::Num) throw std::logic_error("num_value on non-constant");
  return n_->num;
}

Expr num(const Rational& r) { return mk_num(r); }
Expr num(long n) { return mk_num(Rational(n)); }
Expr num(long n, long d) { return mk_num(Rational(n, d)); }

Expr var(const std::string& name, std::vector<std::string> deps) {
  if (name.empty()) throw std::invalid_argument("empty variable name");
  Node n;
  n.kind = Kind::Var;
  n.name = name;
  std::sort(deps.begin(), deps.end());
  n.deps = std::move(deps);
  return wrap(std::move(n));
}

Expr dif(const std::string& name, std::vector<std::string> orders,
         std::vector<std::string> deps) {
  if (orders.empty()) return var(name, std::move(deps));
  Node n;
  n.kind = Kind::Dif;
  n.name = name;
  std::sort(orders.begin(), orders.end());
  n.orders = std::move(orders);
  std::sort(deps.begin(), deps.end());
  n.deps = std::move(deps);
  return wrap(std::move(n));
}

Expr from_atom(const AtomKey& a, std::vector<std::string> deps) {
  return a.is_dif ? dif(a.name, a.orders, std::move(deps))
                  : var(a.name, std::move(deps));
}

Expr add(const Expr& a, const Expr& b) { return add_many_impl({a, b}); }
Expr add_many(const std::vector<Expr>& es) { return add_many_impl(es); }
Expr neg(const Expr& a) { return mul_impl(mk_num(Rational(-1)), a); }
Expr sub(const Expr& a, const Expr& b) { return add_many_impl({a, neg(b)}); }
Expr mul(const Expr& a, const Expr& b) { return mul_impl(a, b); }
Expr mul_many(const std::vector<Expr>& es) {
  Expr r = mk_num(Rational(1));
  for (const Expr& e : es) r = mul_impl(r, e);
  return r;
}
Expr pow(const Expr& a, long k) { return pow_impl(a, k); }

Expr div(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by zero expression");
  return mul_impl(a, pow_impl(b, -1));
}

Expr sqrt_(const Expr& a) {
  const Node& n = a.node();
  switch (n.kind) {
    case Kind::Num: {
      if (n.num.is_zero()) return mk_num(Rational(0));
      return normalize_term(Rational(1), {Factor{a, 1}});
    }
    case Kind::Var:
    case Kind::Dif:
      return normalize_term(Rational(1), {Factor{a, 1}});
    case Kind::Term:
    case Kind::Sum:
      return normalize_term(Rational(1), {Factor{a, 1}});
  }
  return mk_num(Rational(0));
}

int compare(const Expr& a, const Expr& b) { return cmp_expr(a, b); }

// ---------------------------------------------------------------------------
// differentiation
// ---------------------------------------------------------------------------

namespace {

bool contains_dep(const std::vector<std::string>& deps, const std::string& v) {
  return std::binary_search(deps.begin(), deps.end(), v);
}

Expr exp_pow_hexp(const Expr& b, int hexp) {
  // b^(hexp/2) for an arbitrary expression b
  if (hexp == 0) return num(1);
  int s = hexp % 2;
  long k = (hexp - s) / 2;
  Expr r = (k != 0) ? pow(b, k) : num(1);
  if (s > 0) r = mul(r, sqrt_(b));
  if (s < 0) r = div(r, sqrt_(b));
  return r;
}

} // namespace

Expr diff(const Expr& e, const AtomKey& wrt) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
      return num(0);
    case Kind::Var: {
      if (!wrt.is_dif && n.name == wrt.name) return num(1);
      if (!wrt.is_dif && contains_dep(n.deps, wrt.name))
        return dif(n.name, {wrt.name}, n.deps);
      return num(0);
    }
    case Kind::Dif: {
      if (wrt.is_dif && n.name == wrt.name && n.orders == wrt.orders)
        return num(1);
      if (!wrt.is_dif && contains_dep(n.deps, wrt.name)) {
        std::vector<std::string> o = n.orders;
        o.push_back(wrt.name);
        return dif(n.name, std::move(o), n.deps);
      }
      return num(0);
    }
    case Kind::Term: {
      std::vector<Expr> pieces;
      for (size_t i = 0; i < n.factors.size(); ++i) {
        Expr db = diff(n.factors[i].base, wrt);
        if (db.is_zero()) continue;
        std::vector<Factor> rest;
        rest.reserve(n.factors.size());
        for (size_t j = 0; j < n.factors.size(); ++j) {
          if (j == i) {
            if (n.factors[i].hexp != 2)
              rest.push_back(Factor{n.factors[i].base, n.factors[i].hexp - 2});
          } else {
            rest.push_back(n.factors[j]);
          }
        }
        Expr piece = normalize_term(n.num * Rational(n.factors[i].hexp, 2),
                                    std::move(rest));
        pieces.push_back(mul(piece, db));
      }
      return add_many(pieces);
    }
    case Kind::Sum: {
      std::vector<Expr> pieces;
      pieces.reserve(n.terms.size());
      for (const Expr& t : n.terms) pieces.push_back(diff(t, wrt));
      return add_many(pieces);
    }
  }
  return num(0);
}

Expr diff(const Expr& e, const std::string& var_name) {
  return diff(e, AtomKey{false, var_name, {}});
}

// ---------------------------------------------------------------------------
// substitution
// ---------------------------------------------------------------------------

Expr subst(const Expr& e, const std::map<AtomKey, Expr>& repl) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
      return e;
    case Kind::Var:
    case Kind::Dif: {
      AtomKey k{n.kind == Kind::Dif, n.name, n.orders};
      auto it = repl.find(k);
      return it == repl.end() ? e : it->second;
    }
    case Kind::Term: {
      Expr r = num(n.num);
      for (const Factor& f : n.factors)
        r = mul(r, exp_pow_hexp(subst(f.base, repl), f.hexp));
      return r;
    }
    case Kind::Sum: {
      std::vector<Expr> pieces;
      pieces.reserve(n.terms.size());
      for (const Expr& t : n.terms) pieces.push_back(subst(t, repl));
      return add_many(pieces);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

struct NumAcc {
  bool exact = true;
  Rational r;
  double d = 0.0;
  double as_double() const { return exact ? r.to_double() : d; }
};

NumAcc acc_of(const Rational& r) { return NumAcc{true, r, 0.0}; }
NumAcc acc_of(double d) { return NumAcc{false, Rational(0), d}; }

NumAcc acc_mul(const NumAcc& a, const NumAcc& b) {
  if (a.exact && b.exact) return acc_of(a.r * b.r);
  return acc_of(a.as_double() * b.as_double());
}
NumAcc acc_add(const NumAcc& a, const NumAcc& b) {
  if (a.exact && b.exact) return acc_of(a.r + b.r);
  return acc_of(a.as_double() + b.as_double());
}

NumAcc acc_pow_hexp(const NumAcc& v, int hexp) {
  int s = hexp % 2;
  long k = (hexp - s) / 2;
  if (s == 0) {
    if (v.exact) {
      if (v.r.is_zero() && k < 0) throw EvalError("division by zero");
      return acc_of(v.r.pow(k));
    }
    return acc_of(std::pow(v.as_double(), (double)k));
  }
  // radical involved
  if (v.exact) {
    if (v.r.is_negative()) throw EvalError("sqrt of negative value");
    if (auto q = v.r.exact_sqrt()) {
      if (q->is_zero() && hexp < 0) throw EvalError("division by zero");
      return acc_of(q->pow(hexp));
    }
  }
  double d = v.as_double();
  if (d < 0) throw EvalError("sqrt of negative value");
  double sq = std::sqrt(d);
  if (sq == 0 && hexp < 0) throw EvalError("division by zero");
  return acc_of(std::pow(sq, (double)hexp));
}

NumAcc eval_acc(const Expr& e, const VarAssignment& a) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
      return acc_of(n.num);
    case Kind::Var:
    case Kind::Dif: {
      std::string key = atom_name(AtomKey{n.kind == Kind::Dif, n.name, n.orders});
      if (auto it = a.exact.find(key); it != a.exact.end()) return acc_of(it->second);
      if (auto it = a.approx.find(key); it != a.approx.end()) return acc_of(it->second);
      throw EvalError("unbound variable '" + key + "'");
    }
    case Kind::Term: {
      NumAcc r = acc_of(n.num);
      for (const Factor& f : n.factors)
        r = acc_mul(r, acc_pow_hexp(eval_acc(f.base, a), f.hexp));
      return r;
    }
    case Kind::Sum: {
      NumAcc r = acc_of(Rational(0));
      for (const Expr& t : n.terms) r = acc_add(r, eval_acc(t, a));
      return r;
    }
  }
  return acc_of(Rational(0));
}

} // namespace

EvalValue eval(const Expr& e, const VarAssignment& a) {
  NumAcc r = eval_acc(e, a);
  if (r.exact) return EvalValue(r.r);
  return EvalValue(r.d);
}

double eval_double(const Expr& e, const VarAssignment& a) {
  return eval_acc(e, a).as_double();
}

// ---------------------------------------------------------------------------
// queries
// ---------------------------------------------------------------------------

void collect_atoms(const Expr& e, std::set<AtomKey>& out) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
      return;
    case Kind::Var:
      out.insert(AtomKey{false, n.name, {}});
      return;
    case Kind::Dif:
      out.insert(AtomKey{true, n.name, n.orders});
      return;
    case Kind::Term:
      for (const Factor& f : n.factors) collect_atoms(f.base, out);
      return;
    case Kind::Sum:
      for (const Expr& t : n.terms) collect_atoms(t, out);
      return;
  }
}

std::set<AtomKey> atoms(const Expr& e) {
  std::set<AtomKey> s;
  collect_atoms(e, s);
  return s;
}

std::string atom_name(const AtomKey& a) {
  if (!a.is_dif) return a.name;
  std::string s = "D(" + a.name + ";";
  for (size_t i = 0; i < a.orders.size(); ++i) {
    if (i) s += ",";
    s += a.orders[i];
  }
  s += ")";
  return s;
}

std::map<MonoKey, Expr> collect(const Expr& e, const std::set<AtomKey>& wrt) {
  std::map<MonoKey, Expr> out;
  const Node& n = e.node();
  std::vector<Expr> terms =
      (n.kind == Kind::Sum) ? n.terms : std::vector<Expr>{e};
  for (const Expr& t : terms) {
    if (t.is_zero()) continue;
    Rational c;
    std::vector<Factor> f;
    term_parts(t, c, f);
    MonoKey key;
    std::vector<Factor> rest;
    for (const Factor& fac : f) {
      const Node& bn = fac.base.node();
      bool in_wrt = is_atom_kind(bn.kind) &&
                    wrt.count(AtomKey{bn.kind == Kind::Dif, bn.name, bn.orders});
      if (in_wrt) {
        if (fac.hexp < 0 || fac.hexp % 2 != 0)
          throw std::invalid_argument(
              "collect: expression not polynomial in requested atoms");
        key.push_back({AtomKey{bn.kind == Kind::Dif, bn.name, bn.orders}, fac.hexp});
      } else {
        std::set<AtomKey> inner = atoms(fac.base);
        for (const AtomKey& k : inner)
          if (wrt.count(k))
            throw std::invalid_argument(
                "collect: requested atom occurs inside a radical or denominator");
        rest.push_back(fac);
      }
    }
    std::sort(key.begin(), key.end());
    Expr coeff_part = normalize_term(c, std::move(rest));
    auto it = out.find(key);
    if (it == out.end())
      out.emplace(std::move(key), coeff_part);
    else
      it->second = add(it->second, coeff_part);
  }
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.is_zero())
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

bool polynomial_in(const Expr& e, const std::set<AtomKey>& wrt, int max_deg) {
  try {
    auto m = collect(e, wrt);
    for (const auto& [k, v] : m) {
      int deg = 0;
      for (const auto& [a, h] : k) deg += h / 2;
      if (deg > max_deg) return false;
    }
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

// ---------------------------------------------------------------------------
// equality
// ---------------------------------------------------------------------------

bool equal(const Expr& a, const Expr& b, unsigned seed) {
  if (cmp_expr(a, b) == 0) return true;
  Expr d = sub(a, b);
  if (d.is_zero()) return true;
  // randomized numerical fallback; sample every atom either side mentions
  std::set<AtomKey> at = atoms(a);
  std::set<AtomKey> bt = atoms(b);
  at.insert(bt.begin(), bt.end());
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> numd(-8, 8), dend(1, 5);
  int valid = 0, attempts = 0;
  while (valid < 32 && attempts < 500) {
    ++attempts;
    VarAssignment asg;
    for (const AtomKey& k : at) {
      int nu = numd(rng), de = dend(rng);
      if (attempts > 100 && nu <= 0) nu = 1 - nu; // bias positive if domain is tight
      asg.set(atom_name(k), Rational(nu, de));
    }
    double va, vb;
    try {
      va = eval_double(a, asg);
      vb = eval_double(b, asg);
    } catch (const EvalError&) {
      continue; // domain violation: resample
    }
    ++valid;
    double scale = std::max({1.0, std::fabs(va), std::fabs(vb)});
    if (std::fabs(va - vb) > 1e-10 * scale) return false;
  }
  if (valid < 8)
    throw EvalError("equal(): could not sample enough valid points");
  return true;
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

namespace {

void print_expr(std::ostream& os, const Expr& e);

// Would the lexer fold a bare trailing "^k" into this identifier?  True for
// heads that default-bind a caret index group while the name still has none
// (xd, pd, ..., y, z, q).  Such exponents must print parenthesized.
bool name_absorbs_caret(const std::string& name) {
  if (name.find('^') != std::string::npos) return false;
  size_t h = 0;
  while (h < name.size() && std::isalpha(static_cast<unsigned char>(name[h])))
    ++h;
  std::string head = name.substr(0, h);
  return !head.empty() &&
         (head.back() == 'd' || head == "y" || head == "z" || head == "q");
}

// one factor, rendered for the numerator; may emit several '*'-joined pieces
void render_factor_pieces(const Expr& base, int hexp, std::vector<std::string>& out) {
  assert(hexp > 0);
  const Node& bn = base.node();
  std::string bs;
  {
    std::ostringstream ss;
    if (bn.kind == Kind::Sum) {
      ss << "(";
      print_expr(ss, base);
      ss << ")";
    } else if (bn.kind == Kind::Num || bn.kind == Kind::Term) {
      print_expr(ss, base); // only appears under sqrt below
      bs = ss.str();
    } else {
      print_expr(ss, base);
    }
    if (bs.empty()) bs = ss.str();
  }
  int s = hexp % 2;
  int k = (hexp - s) / 2;
  if (k == 1)
    out.push_back(bs);
  else if (k > 1) {
    if (bn.kind == Kind::Var && name_absorbs_caret(bn.name))
      out.push_back(bs + "^(" + std::to_string(k) + ")");
    else
      out.push_back(bs + "^" + std::to_string(k));
  }
  if (s == 1) {
    std::ostringstream ss;
    ss << "sqrt(";
    print_expr(ss, base);
    ss << ")";
    out.push_back(ss.str());
  }
}

void print_term(std::ostream& os, const Rational& coeff,
                const std::vector<Factor>& factors, bool print_sign_magnitude) {
  Rational c = coeff;
  if (print_sign_magnitude) c = c.abs();
  std::vector<std::string> numer, denom;
  for (const Factor& f : factors) {
    if (f.hexp > 0)
      render_factor_pieces(f.base, f.hexp, numer);
    else
      render_factor_pieces(f.base, -f.hexp, denom);
  }
  bool coeff_shown = !c.is_one() || numer.empty();
  std::string cs = c.str();
  // a fractional coefficient prints as num/den which composes with '/' pieces
  bool first = true;
  if (coeff_shown) {
    os << cs;
    first = false;
  }
  for (const std::string& p : numer) {
    if (!first) os << "*";
    os << p;
    first = false;
  }
  for (const std::string& p : denom) os << "/" << p;
}

void print_expr(std::ostream& os, const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num:
      os << n.num.str();
      return;
    case Kind::Var:
      os << n.name;
      return;
    case Kind::Dif:
      os << atom_name(AtomKey{true, n.name, n.orders});
      return;
    case Kind::Term:
      if (n.num.is_negative()) os << "-";
      print_term(os, n.num, n.factors, true);
      return;
    case Kind::Sum: {
      bool first = true;
      for (const Expr& t : n.terms) {
        Rational c;
        std::vector<Factor> f;
        term_parts(t, c, f);
        if (first) {
          if (c.is_negative()) os << "-";
          print_term(os, c, f, true);
          first = false;
        } else {
          os << (c.is_negative() ? " - " : " + ");
          print_term(os, c, f, true);
        }
      }
      return;
    }
  }
}

} // namespace

std::string to_string(const Expr& e) {
  std::ostringstream ss;
  print_expr(ss, e);
  return ss.str();
}

} // namespace wedge::sym
