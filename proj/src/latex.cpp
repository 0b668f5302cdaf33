#include "wedge/latex.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace wedge::sym {

namespace {

const std::map<std::string, std::string>& head_table() {
  static const std::map<std::string, std::string> t = {
      {"xd", "\\dot{x}"},   {"xp", "x'"},          {"xdd", "\\dot{x}'"},
      {"pd", "\\dot{p}"},   {"ed", "\\dot{e}"},    {"fd", "\\dot{f}"},
      {"xid", "\\dot{\\xi}"}, {"xi", "\\xi"},      {"pi", "\\pi"},
      {"phi", "\\varphi"},  {"rho", "\\rho"},      {"del", "\\delta"},
  };
  return t;
}

std::string latex_head(const std::string& head) {
  auto it = head_table().find(head);
  if (it != head_table().end()) return it->second;
  if (head.size() == 1) return head;
  return "\\mathrm{" + head + "}";
}

struct SplitName {
  std::string head;
  std::vector<std::pair<char, std::string>> groups;
};

SplitName split_name(const std::string& n) {
  SplitName r;
  size_t i = 0;
  while (i < n.size() && std::isalpha((unsigned char)n[i])) r.head += n[i++];
  while (i < n.size() && (n[i] == '_' || n[i] == '^')) {
    char sep = n[i++];
    std::string idx;
    while (i < n.size() && std::isalnum((unsigned char)n[i])) idx += n[i++];
    r.groups.push_back({sep, idx});
  }
  if (i != n.size()) { // not of coordinate shape: emit verbatim-ish
    r.head = n;
    r.groups.clear();
  }
  return r;
}

std::string join_groups(const SplitName& sn, char sep) {
  std::string out;
  for (const auto& [s, idx] : sn.groups) {
    if (s != sep) continue;
    if (!out.empty()) out += ",";
    out += idx;
  }
  return out;
}

} // namespace

std::string latex_name(const std::string& coordinate_name) {
  SplitName sn = split_name(coordinate_name);
  if (sn.groups.empty() && sn.head == coordinate_name && sn.head.size() > 1 &&
      head_table().find(sn.head) == head_table().end()) {
    bool alpha = true;
    for (char c : sn.head)
      if (!std::isalpha((unsigned char)c)) alpha = false;
    if (!alpha) return "\\mathrm{" + coordinate_name + "}";
  }
  std::string out = latex_head(sn.head);
  std::string lo = join_groups(sn, '_');
  std::string hi = join_groups(sn, '^');
  if (!lo.empty()) out += "_{" + lo + "}";
  if (!hi.empty()) out += "^{" + hi + "}";
  return out;
}

namespace {

std::string latex_expr(const Expr& e);

std::string latex_atom(const Node& n) {
  if (n.kind == Kind::Var) return latex_name(n.name);
  // derivative leaf: z with orders (x,y) -> z_{xy}; if the base name already
  // carries a subscript the orders join it after a comma: x_{1,t}
  SplitName sn = split_name(n.name);
  std::string base = latex_head(sn.head);
  std::string lo = join_groups(sn, '_');
  std::string hi = join_groups(sn, '^');
  std::string ord;
  for (const std::string& o : n.orders) ord += o;
  if (!lo.empty())
    base += "_{" + lo + "," + ord + "}";
  else
    base += "_{" + ord + "}";
  if (!hi.empty()) base += "^{" + hi + "}";
  return base;
}

std::string latex_base(const Expr& b, bool parenthesize_sums) {
  const Node& n = b.node();
  switch (n.kind) {
    case Kind::Num:
    case Kind::Term:
      return latex_expr(b); // only occurs under \sqrt
    case Kind::Var:
    case Kind::Dif:
      return latex_atom(n);
    case Kind::Sum:
      return parenthesize_sums ? "\\left(" + latex_expr(b) + "\\right)"
                               : latex_expr(b);
  }
  return "";
}

void latex_pieces(const Expr& base, int hexp, std::vector<std::string>& out) {
  int s = hexp % 2;
  int k = (hexp - s) / 2;
  if (k == 1)
    out.push_back(latex_base(base, true));
  else if (k > 1)
    out.push_back(latex_base(base, true) + "^{" + std::to_string(k) + "}");
  if (s == 1) out.push_back("\\sqrt{" + latex_base(base, false) + "}");
}

std::string latex_coeff(const Rational& c) {
  Rational a = c.abs();
  if (a.is_integer()) return a.str();
  mpq_class q = a.raw();
  return "\\tfrac{" + q.get_num().get_str() + "}{" + q.get_den().get_str() + "}";
}

std::string latex_term(const Rational& coeff, const std::vector<Factor>& fs) {
  std::vector<std::string> numer, denom;
  for (const Factor& f : fs) {
    if (f.hexp > 0)
      latex_pieces(f.base, f.hexp, numer);
    else
      latex_pieces(f.base, -f.hexp, denom);
  }
  Rational a = coeff.abs();
  std::string head;
  if (!a.is_one() || numer.empty()) head = latex_coeff(coeff);
  std::string num_s = head;
  for (const std::string& p : numer) {
    if (!num_s.empty()) num_s += "\\,";
    num_s += p;
  }
  if (denom.empty()) return num_s;
  std::string den_s;
  for (const std::string& p : denom) {
    if (!den_s.empty()) den_s += "\\,";
    den_s += p;
  }
  if (num_s.empty()) num_s = "1";
  return "\\frac{" + num_s + "}{" + den_s + "}";
}

std::string latex_expr(const Expr& e) {
  const Node& n = e.node();
  switch (n.kind) {
    case Kind::Num: {
      std::string s = n.num.is_negative() ? "-" : "";
      return s + latex_coeff(n.num);
    }
    case Kind::Var:
    case Kind::Dif:
      return latex_atom(n);
    case Kind::Term: {
      std::string s = n.num.is_negative() ? "-" : "";
      return s + latex_term(n.num, n.factors);
    }
    case Kind::Sum: {
      std::string out;
      bool first = true;
      for (const Expr& t : n.terms) {
        const Node& tn = t.node();
        Rational c = (tn.kind == Kind::Num)    ? tn.num
                     : (tn.kind == Kind::Term) ? tn.num
                                               : Rational(1);
        std::vector<Factor> fs;
        if (tn.kind == Kind::Term)
          fs = tn.factors;
        else if (tn.kind == Kind::Var || tn.kind == Kind::Dif)
          fs = {Factor{t, 2}};
        if (first) {
          out += (c.is_negative() ? "-" : "") + latex_term(c, fs);
          first = false;
        } else {
          out += c.is_negative() ? " - " : " + ";
          out += latex_term(c, fs);
        }
      }
      return out;
    }
  }
  return "";
}

} // namespace

std::string to_latex(const Expr& e) { return latex_expr(e); }

} // namespace wedge::sym
