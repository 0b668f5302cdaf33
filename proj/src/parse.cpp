#include "wedge/parse.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace wedge::sym {

int normalize_index_string(std::string& idx, bool antisym) {
  int sign = 1;
  // insertion sort, counting transpositions
  for (size_t i = 1; i < idx.size(); ++i) {
    for (size_t j = i; j > 0 && idx[j - 1] > idx[j]; --j) {
      std::swap(idx[j - 1], idx[j]);
      if (antisym) sign = -sign;
    }
  }
  if (antisym) {
    for (size_t i = 1; i < idx.size(); ++i)
      if (idx[i] == idx[i - 1]) return 0;
  }
  return sign;
}

namespace {

const std::set<std::string>& antisym_heads() {
  static const std::set<std::string> s = {"xd", "xdd", "xp", "p",
                                          "pd", "y",   "z",  "q"};
  return s;
}

std::string assemble(const std::string& head, const std::vector<IndexGroup>& gs) {
  std::string s = head;
  for (const IndexGroup& g : gs) {
    s += g.sep;
    s += g.idx;
  }
  return s;
}

} // namespace

Expr default_symbol(const std::string& head, const std::vector<IndexGroup>& groups) {
  bool sym = (head == "g");
  bool anti = antisym_heads().count(head) > 0;
  if (!sym && !anti) return var(assemble(head, groups));
  int sign = 1;
  std::vector<IndexGroup> gs = groups;
  for (IndexGroup& g : gs) {
    int s = normalize_index_string(g.idx, anti);
    if (s == 0) return num(0);
    sign *= s;
  }
  // same-shape groups are wedge factors of one family: sort them with a
  // transposition sign (pd_34_12 = -pd_12_34); equal groups vanish
  if (anti && gs.size() > 1) {
    for (size_t i = 1; i < gs.size(); ++i) {
      for (size_t j = i;
           j > 0 && gs[j - 1].sep == gs[j].sep &&
           gs[j - 1].idx.size() == gs[j].idx.size() && gs[j - 1].idx > gs[j].idx;
           --j) {
        std::swap(gs[j - 1], gs[j]);
        sign = -sign;
      }
    }
    for (size_t i = 1; i < gs.size(); ++i)
      if (gs[i].sep == gs[i - 1].sep && gs[i].idx == gs[i - 1].idx) return num(0);
  }
  Expr v = var(assemble(head, gs));
  return sign == 1 ? v : neg(v);
}

namespace {

class Parser {
 public:
  Parser(const std::string& text, const ParseOptions& opts)
      : s_(text), opts_(opts) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  const std::string& s_;
  const ParseOptions& opts_;
  size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, pos_);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  Expr parse_expr() {
    bool negate = eat('-');
    Expr acc = parse_term();
    if (negate) acc = neg(acc);
    for (;;) {
      if (eat('+'))
        acc = add(acc, parse_term());
      else if (eat('-'))
        acc = sub(acc, parse_term());
      else
        return acc;
    }
  }

  Expr parse_term() {
    Expr acc = parse_factor();
    for (;;) {
      if (eat('*'))
        acc = mul(acc, parse_factor());
      else if (eat('/')) {
        size_t at = pos_;
        Expr d = parse_factor();
        if (d.is_zero()) throw ParseError("division by zero", at);
        acc = div(acc, d);
      } else
        return acc;
    }
  }

  Expr parse_factor() {
    Expr b = parse_base();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      long k = parse_int_exponent();
      return pow(b, k);
    }
    return b;
  }

  long parse_int_exponent() {
    skip_ws();
    bool paren = eat('(');
    skip_ws();
    bool negv = eat('-');
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit((unsigned char)s_[pos_]))
      fail("expected integer exponent");
    long v = 0;
    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1000000) fail("exponent out of range");
      ++pos_;
    }
    if (paren && !eat(')')) fail("expected ')' after exponent");
    return negv ? -v : v;
  }

  Expr parse_base() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit((unsigned char)c)) return parse_number();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha((unsigned char)c)) return parse_name();
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
    std::string intpart = s_.substr(start, pos_ - start);
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      size_t fs = pos_;
      while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
      if (pos_ == fs) fail("expected digits after decimal point");
      std::string frac = s_.substr(fs, pos_ - fs);
      // exact decimal: ab.cd = abcd / 10^|cd|
      Rational r = Rational::from_string(intpart + frac);
      Rational den(1);
      for (size_t i = 0; i < frac.size(); ++i) den *= Rational(10);
      return num(r / den);
    }
    return num(Rational::from_string(intpart));
  }

  // plain word: letters only (for D(...) arguments)
  std::string parse_word() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum((unsigned char)s_[pos_]) ||
                                s_[pos_] == '_'))
      ++pos_;
    if (pos_ == start) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }

  Expr parse_name() {
    size_t start = pos_;
    std::string head;
    while (pos_ < s_.size() && std::isalpha((unsigned char)s_[pos_]))
      head += s_[pos_++];

    if (head == "sqrt" && peek() == '(') {
      ++pos_; // consume '('
      Expr e = parse_expr();
      if (!eat(')')) fail("expected ')' after sqrt argument");
      return sqrt_(e);
    }
    if (head == "D" && peek() == '(') {
      ++pos_;
      std::string fn = parse_word();
      std::vector<std::string> orders;
      if (!eat(';')) fail("expected ';' in derivative node D(f;v,...)");
      orders.push_back(parse_word());
      while (eat(',')) orders.push_back(parse_word());
      if (!eat(')')) fail("expected ')' closing derivative node");
      // parsed leaves only know the variables they were differentiated by
      return dif(fn, orders, orders);
    }

    // index groups: '_' always binds; '^' binds per options/resolver
    std::vector<IndexGroup> groups;
    auto lex_group = [&]() -> bool {
      if (pos_ >= s_.size() || (s_[pos_] != '_' && s_[pos_] != '^')) return false;
      char sep = s_[pos_];
      size_t save = pos_++;
      std::string idx;
      while (pos_ < s_.size() && std::isalnum((unsigned char)s_[pos_]))
        idx += s_[pos_++];
      if (idx.empty()) {
        pos_ = save;
        return false;
      }
      groups.push_back({sep, idx});
      return true;
    };
    // absorb greedily, then let the resolver shed '^' groups from the right
    for (;;) {
      if (pos_ < s_.size() && s_[pos_] == '_') {
        if (!lex_group()) break;
      } else if (pos_ < s_.size() && s_[pos_] == '^' && opts_.bind_carets) {
        if (!lex_group()) break;
      } else
        break;
    }

    // only textually trailing '^' groups may be handed back as exponents; a
    // '^' group followed by a '_' group is forced to stay in the identifier
    size_t minKeep = groups.size();
    while (minKeep > 0 && groups[minKeep - 1].sep == '^') --minKeep;

    if (opts_.resolve) {
      for (size_t keep = groups.size() + 1; keep-- > minKeep;) {
        std::vector<IndexGroup> g(groups.begin(), groups.begin() + (long)keep);
        if (auto r = opts_.resolve(head, g)) {
          rewind_carets(start, head, g);
          return *r;
        }
      }
      // fall through to default rules on full decline
    }

    // default binding: heads ending in 'd' and the fiber heads y, z, q keep
    // one '^' group; everything else keeps none (so x^2 is a square)
    size_t want = 0;
    if (!head.empty() &&
        (head.back() == 'd' || head == "y" || head == "z" || head == "q"))
      want = 1;
    size_t keep = groups.size();
    size_t carets = 0;
    for (size_t i = 0; i < groups.size(); ++i)
      if (groups[i].sep == '^') ++carets;
    while (keep > minKeep && carets > want) {
      --keep;
      --carets;
    }
    std::vector<IndexGroup> kept(groups.begin(), groups.begin() + (long)keep);
    rewind_carets(start, head, kept);
    return default_symbol(head, kept);
  }

  // reposition the cursor right after the identifier spelled by head+groups
  // (dropped '^' groups are handed back to the grammar as exponents)
  void rewind_carets(size_t start, const std::string& head,
                     const std::vector<IndexGroup>& kept) {
    size_t len = head.size();
    for (const IndexGroup& g : kept) len += 1 + g.idx.size();
    pos_ = start + len;
  }
};

} // namespace

Expr parse(const std::string& text, const ParseOptions& opts) {
  return Parser(text, opts).run();
}

Expr parse(const std::string& text) { return parse(text, ParseOptions{}); }

} // namespace wedge::sym
