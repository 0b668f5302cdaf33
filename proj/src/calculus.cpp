#include "wedge/calculus.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "wedge/latex.hpp"

namespace wedge::geo {

namespace detail {

int sort_sign(std::vector<int>& v) {
  int sign = 1;
  for (size_t i = 1; i < v.size(); ++i)
    for (size_t j = i; j > 0 && v[j - 1] >= v[j]; --j) {
      if (v[j - 1] == v[j]) return 0;
      std::swap(v[j - 1], v[j]);
      sign = -sign;
    }
  return sign;
}

} // namespace detail

namespace {

using detail::sort_sign;

void check_tuple(const Chart& c, const std::vector<int>& t, int degree) {
  if ((int)t.size() != degree)
    throw std::invalid_argument("tuple length does not match degree");
  for (int p : t)
    if (p < 0 || p >= c.dim())
      throw std::invalid_argument("tuple position outside chart");
}

// shared component container logic
void add_into(std::map<std::vector<int>, Expr>& m, std::vector<int> tuple,
              const Expr& c) {
  int s = sort_sign(tuple);
  if (s == 0 || c.is_zero()) return;
  Expr v = s < 0 ? sym::neg(c) : c;
  auto it = m.find(tuple);
  if (it == m.end()) {
    m.emplace(std::move(tuple), std::move(v));
    return;
  }
  it->second = sym::add(it->second, v);
  if (it->second.is_zero()) m.erase(it);
}

Expr at_of(const std::map<std::vector<int>, Expr>& m, std::vector<int> tuple) {
  int s = sort_sign(tuple);
  if (s == 0) return sym::num(0);
  auto it = m.find(tuple);
  if (it == m.end()) return sym::num(0);
  return s < 0 ? sym::neg(it->second) : it->second;
}

bool identical_maps(const std::map<std::vector<int>, Expr>& a,
                    const std::map<std::vector<int>, Expr>& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || !sym::identical(v, it->second)) return false;
  }
  return true;
}

void enum_tuples(int dim, int q, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> t(q);
  std::function<void(int, int)> rec = [&](int slot, int from) {
    if (slot == q) {
      fn(t);
      return;
    }
    for (int p = from; p < dim; ++p) {
      t[slot] = p;
      rec(slot + 1, p + 1);
    }
  };
  rec(0, 0);
}

Expr det_expr(const std::vector<std::vector<Expr>>& m) {
  size_t n = m.size();
  if (n == 0) return sym::num(1);
  if (n == 1) return m[0][0];
  Expr acc = sym::num(0);
  // Laplace along the first row; matrices stay tiny here
  for (size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<Expr>> sub(n - 1);
    for (size_t r = 1; r < n; ++r)
      for (size_t c = 0; c < n; ++c)
        if (c != j) sub[r - 1].push_back(m[r][c]);
    Expr piece = sym::mul(m[0][j], det_expr(sub));
    acc = (j % 2 == 0) ? sym::add(acc, piece) : sym::sub(acc, piece);
  }
  return acc;
}

std::string join_tuple(const Chart& c, const std::vector<int>& k,
                       const char* sep, const char* mark) {
  std::string s;
  for (size_t i = 0; i < k.size(); ++i) {
    if (i) s += sep;
    s += mark;
    s += c.coord(k[i]).name;
  }
  return s;
}

} // namespace

// ---------------------------------------------------------------------------
// Form / PolyField basics
// ---------------------------------------------------------------------------

Form::Form(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
  if (degree < 0) throw std::invalid_argument("negative form degree");
}

void Form::add_term(std::vector<int> tuple, const Expr& c) {
  check_tuple(chart_, tuple, degree_);
  add_into(coeff_, std::move(tuple), c);
}

Expr Form::at(std::vector<int> tuple) const {
  check_tuple(chart_, tuple, degree_);
  return at_of(coeff_, std::move(tuple));
}

Form Form::operator+(const Form& o) const {
  if (degree_ != o.degree_ || !chart_.same_coords(o.chart_))
    throw std::invalid_argument("form sum shape mismatch");
  Form r = *this;
  for (const auto& [k, v] : o.coeff_) add_into(r.coeff_, k, v);
  return r;
}

Form Form::operator-(const Form& o) const {
  if (degree_ != o.degree_ || !chart_.same_coords(o.chart_))
    throw std::invalid_argument("form difference shape mismatch");
  Form r = *this;
  for (const auto& [k, v] : o.coeff_) add_into(r.coeff_, k, sym::neg(v));
  return r;
}

Form Form::operator*(const Expr& s) const {
  Form r(chart_, degree_);
  for (const auto& [k, v] : coeff_) add_into(r.coeff_, k, sym::mul(v, s));
  return r;
}

bool Form::identical_to(const Form& o) const {
  return degree_ == o.degree_ && chart_.same_coords(o.chart_) &&
         identical_maps(coeff_, o.coeff_);
}

PolyField::PolyField(Chart chart, int degree)
    : chart_(std::move(chart)), degree_(degree) {
  if (degree < 0) throw std::invalid_argument("negative field degree");
}

void PolyField::add_term(std::vector<int> tuple, const Expr& c) {
  check_tuple(chart_, tuple, degree_);
  add_into(coeff_, std::move(tuple), c);
}

Expr PolyField::at(std::vector<int> tuple) const {
  check_tuple(chart_, tuple, degree_);
  return at_of(coeff_, std::move(tuple));
}

PolyField PolyField::operator+(const PolyField& o) const {
  if (degree_ != o.degree_ || !chart_.same_coords(o.chart_))
    throw std::invalid_argument("field sum shape mismatch");
  PolyField r = *this;
  for (const auto& [k, v] : o.coeff_) add_into(r.coeff_, k, v);
  return r;
}

PolyField PolyField::operator-(const PolyField& o) const {
  if (degree_ != o.degree_ || !chart_.same_coords(o.chart_))
    throw std::invalid_argument("field difference shape mismatch");
  PolyField r = *this;
  for (const auto& [k, v] : o.coeff_) add_into(r.coeff_, k, sym::neg(v));
  return r;
}

PolyField PolyField::operator*(const Expr& s) const {
  PolyField r(chart_, degree_);
  for (const auto& [k, v] : coeff_) add_into(r.coeff_, k, sym::mul(v, s));
  return r;
}

bool PolyField::identical_to(const PolyField& o) const {
  return degree_ == o.degree_ && chart_.same_coords(o.chart_) &&
         identical_maps(coeff_, o.coeff_);
}

std::string Form::str() const {
  if (coeff_.empty()) return "0";
  std::string s;
  for (const auto& [k, v] : coeff_) {
    if (!s.empty()) s += " + ";
    std::string c = sym::to_string(v);
    if (c.find(' ') != std::string::npos) c = "(" + c + ")";
    s += c;
    if (!k.empty()) s += " " + join_tuple(chart_, k, "/\\", "d.");
  }
  return s;
}

std::string Form::latex() const {
  if (coeff_.empty()) return "0";
  std::string s;
  for (const auto& [k, v] : coeff_) {
    if (!s.empty()) s += " + ";
    std::string c = sym::to_latex(v);
    if (v.kind() == sym::Kind::Sum) c = "\\left(" + c + "\\right)";
    s += c;
    for (int p : k) s += "\\,\\mathrm{d}" + sym::latex_name(chart_.coord(p).name);
  }
  return s;
}

std::string PolyField::str() const {
  if (coeff_.empty()) return "0";
  std::string s;
  for (const auto& [k, v] : coeff_) {
    if (!s.empty()) s += " + ";
    std::string c = sym::to_string(v);
    if (c.find(' ') != std::string::npos) c = "(" + c + ")";
    s += c;
    if (!k.empty()) s += " " + join_tuple(chart_, k, "/\\", "@");
  }
  return s;
}

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

Form exterior_d(const Chart& c, const Expr& f) {
  Form r(c, 1);
  for (int p = 0; p < c.dim(); ++p) {
    Expr df = sym::diff(f, c.coord(p).name);
    if (!df.is_zero()) r.add_term({p}, df);
  }
  return r;
}

Form exterior_d(const Form& a) {
  Form r(a.chart(), a.degree() + 1);
  for (const auto& [k, v] : a.stored())
    for (int p = 0; p < a.chart().dim(); ++p) {
      Expr dv = sym::diff(v, a.chart().coord(p).name);
      if (dv.is_zero()) continue;
      std::vector<int> t;
      t.reserve(k.size() + 1);
      t.push_back(p);
      t.insert(t.end(), k.begin(), k.end());
      r.add_term(std::move(t), dv);
    }
  return r;
}

Form wedge(const Form& a, const Form& b) {
  if (!a.chart().same_coords(b.chart()))
    throw std::invalid_argument("wedge across different charts");
  Form r(a.chart(), a.degree() + b.degree());
  for (const auto& [ka, ca] : a.stored())
    for (const auto& [kb, cb] : b.stored()) {
      std::vector<int> k = ka;
      k.insert(k.end(), kb.begin(), kb.end());
      r.add_term(std::move(k), sym::mul(ca, cb));
    }
  return r;
}

PolyField wedge(const PolyField& a, const PolyField& b) {
  if (!a.chart().same_coords(b.chart()))
    throw std::invalid_argument("wedge across different charts");
  PolyField r(a.chart(), a.degree() + b.degree());
  for (const auto& [ka, ca] : a.stored())
    for (const auto& [kb, cb] : b.stored()) {
      std::vector<int> k = ka;
      k.insert(k.end(), kb.begin(), kb.end());
      r.add_term(std::move(k), sym::mul(ca, cb));
    }
  return r;
}

Form contract(const PolyField& u, const Form& a) {
  if (!u.chart().same_coords(a.chart()))
    throw std::invalid_argument("contraction across different charts");
  int q = u.degree(), p = a.degree();
  if (q > p) throw std::invalid_argument("contraction degree exceeds form degree");
  Form r(a.chart(), p - q);
  for (const auto& [i, ui] : u.stored())
    for (const auto& [k, ak] : a.stored()) {
      // need i to be a subset of k; the remainder is the output slot
      std::vector<int> rest;
      size_t ii = 0;
      bool subset = true;
      for (int pos : k) {
        if (ii < i.size() && i[ii] == pos)
          ++ii;
        else
          rest.push_back(pos);
      }
      subset = (ii == i.size());
      if (!subset) continue;
      // the q-vector fills the first q slots: sign of (i ++ rest) -> k
      std::vector<int> perm = i;
      perm.insert(perm.end(), rest.begin(), rest.end());
      int s = sort_sign(perm);
      r.add_term(std::move(rest), s < 0 ? sym::neg(sym::mul(ui, ak))
                                        : sym::mul(ui, ak));
    }
  return r;
}

PolyField lie_bracket(const PolyField& x, const PolyField& y) {
  if (x.degree() != 1 || y.degree() != 1)
    throw std::invalid_argument("lie_bracket expects vector fields");
  if (!x.chart().same_coords(y.chart()))
    throw std::invalid_argument("lie_bracket across different charts");
  const Chart& c = x.chart();
  PolyField r(c, 1);
  for (int i = 0; i < c.dim(); ++i) {
    Expr acc = sym::num(0);
    for (int j = 0; j < c.dim(); ++j) {
      const std::string& xj = c.coord(j).name;
      acc = sym::add(acc, sym::mul(x.at({j}), sym::diff(y.at({i}), xj)));
      acc = sym::sub(acc, sym::mul(y.at({j}), sym::diff(x.at({i}), xj)));
    }
    if (!acc.is_zero()) r.add_term({i}, acc);
  }
  return r;
}

PolyField weight_field(const Chart& c, int selector) {
  if (selector != 1 && selector != 2)
    throw std::invalid_argument("weight_field selector is 1 or 2");
  PolyField r(c, 1);
  for (int p = 0; p < c.dim(); ++p) {
    int w = selector == 1 ? c.coord(p).d1 : c.coord(p).d2;
    if (w != 0) r.add_term({p}, sym::mul(sym::num(w), c.v(p)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// coordinate maps
// ---------------------------------------------------------------------------

const Expr& CoordMap::entry(const std::string& target_coord) const {
  auto it = entries.find(target_coord);
  if (it == entries.end())
    throw std::out_of_range("coordinate map has no entry for " + target_coord);
  return it->second;
}

Expr CoordMap::apply(const Expr& e_on_target) const {
  std::map<sym::AtomKey, Expr> repl;
  for (const auto& [name, val] : entries)
    repl.emplace(sym::AtomKey{false, name, {}}, val);
  return sym::subst(e_on_target, repl);
}

void CoordMap::validate() const {
  for (const Coordinate& c : target.coords())
    if (!entries.count(c.name))
      throw std::invalid_argument("coordinate map misses entry for " + c.name);
}

CoordMap identity_map(const Chart& c) {
  CoordMap m{c, c, {}};
  for (const Coordinate& k : c.coords()) m.entries.emplace(k.name, sym::var(k.name));
  return m;
}

CoordMap compose(const CoordMap& f, const CoordMap& g) {
  if (!f.source.same_coords(g.target))
    throw std::invalid_argument("composition charts do not line up");
  CoordMap m{g.source, f.target, {}};
  for (const auto& [name, val] : f.entries) m.entries.emplace(name, g.apply(val));
  return m;
}

Form pullback(const CoordMap& psi, const Form& a) {
  if (!psi.target.same_coords(a.chart()))
    throw std::invalid_argument("pullback of a form on the wrong chart");
  Form r(psi.source, a.degree());
  for (const auto& [k, v] : a.stored()) {
    Form piece(psi.source, 0);
    piece.add_term({}, psi.apply(v));
    for (int pos : k)
      piece = wedge(piece, exterior_d(psi.source,
                                      psi.entry(a.chart().coord(pos).name)));
    r = r + piece;
  }
  return r;
}

PolyField pushforward_field(const CoordMap& psi, const PolyField& x) {
  if (!psi.source.same_coords(x.chart()))
    throw std::invalid_argument("pushforward of a field on the wrong chart");
  int q = x.degree();
  PolyField r(psi.target, q);
  enum_tuples(psi.target.dim(), q, [&](const std::vector<int>& J) {
    Expr acc = sym::num(0);
    for (const auto& [I, xi] : x.stored()) {
      std::vector<std::vector<Expr>> m(q, std::vector<Expr>());
      for (int a = 0; a < q; ++a)
        for (int b = 0; b < q; ++b)
          m[a].push_back(sym::diff(psi.entry(psi.target.coord(J[a]).name),
                                   psi.source.coord(I[b]).name));
      Expr minor = det_expr(m);
      if (!minor.is_zero()) acc = sym::add(acc, sym::mul(xi, minor));
    }
    if (!acc.is_zero()) r.add_term(J, acc);
  });
  return r;
}

CoordMap lift_coord_map(const CoordMap& psi, int n) {
  Chart LN = wedge_tangent(n, psi.source);
  Chart LP = wedge_tangent(n, psi.target);
  CoordMap m{LN, LP, psi.entries};
  for (int wp = psi.target.dim(); wp < LP.dim(); ++wp) {
    const Coordinate& wc = LP.coord(wp);
    Expr acc = sym::num(0);
    for (int sp = psi.source.dim(); sp < LN.dim(); ++sp) {
      const Coordinate& sc = LN.coord(sp);
      std::vector<std::vector<Expr>> jac(n, std::vector<Expr>());
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          jac[a].push_back(
              sym::diff(psi.entry(psi.target.coord(wc.parents[a]).name),
                        psi.source.coord(sc.parents[b]).name));
      Expr minor = det_expr(jac);
      if (!minor.is_zero()) acc = sym::add(acc, sym::mul(minor, sym::var(sc.name)));
    }
    m.entries.emplace(wc.name, acc);
  }
  return m;
}

Form on_chart(const Chart& big, const Form& a) {
  if (big.dim() < a.chart().dim())
    throw std::invalid_argument("chart extension must keep the original prefix");
  for (int i = 0; i < a.chart().dim(); ++i)
    if (big.coord(i).name != a.chart().coord(i).name)
      throw std::invalid_argument("chart extension must keep the original prefix");
  Form r(big, a.degree());
  for (const auto& [k, v] : a.stored()) r.add_term(k, v);
  return r;
}

PolyField on_chart(const Chart& big, const PolyField& x) {
  if (big.dim() < x.chart().dim())
    throw std::invalid_argument("chart extension must keep the original prefix");
  for (int i = 0; i < x.chart().dim(); ++i)
    if (big.coord(i).name != x.chart().coord(i).name)
      throw std::invalid_argument("chart extension must keep the original prefix");
  PolyField r(big, x.degree());
  for (const auto& [k, v] : x.stored()) r.add_term(k, v);
  return r;
}

PolyField tautological_field(const Chart& lifted, int n) {
  PolyField r(lifted, n);
  bool found = false;
  for (int p = 0; p < lifted.dim(); ++p) {
    const Coordinate& c = lifted.coord(p);
    bool fresh = lifted.depth() == 2 ? c.d1 == 1 : (c.d1 == 0 && c.d2 == 1);
    if (!fresh || (int)c.parents.size() != n) continue;
    r.add_term(c.parents, sym::var(c.name));
    found = true;
  }
  if (!found)
    throw std::invalid_argument("chart carries no degree-" + std::to_string(n) +
                                " fibers");
  return r;
}

Form liouville_form(const Chart& c) {
  int n = -1;
  for (int p = 0; p < c.dim(); ++p) {
    const Coordinate& k = c.coord(p);
    bool fresh = c.depth() == 2 ? k.d1 == 1 : (k.d1 == 0 && k.d2 == 1);
    if (!fresh) continue;
    if (n < 0)
      n = (int)k.parents.size();
    else if (n != (int)k.parents.size())
      throw std::invalid_argument("mixed fiber ranks; no canonical form here");
  }
  if (n <= 0) throw std::invalid_argument("chart has no momentum fibers");
  Form r(c, n);
  for (int p = 0; p < c.dim(); ++p) {
    const Coordinate& k = c.coord(p);
    bool fresh = c.depth() == 2 ? k.d1 == 1 : (k.d1 == 0 && k.d2 == 1);
    if (!fresh) continue;
    r.add_term(k.parents, sym::var(k.name));
  }
  return r;
}

Form canonical_symplectic(const Chart& c) { return exterior_d(liouville_form(c)); }

} // namespace wedge::geo
