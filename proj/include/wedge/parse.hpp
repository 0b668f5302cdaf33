#pragma once

// text -> Expr for coordinates, Lagrangians, Hamiltonians and metrics.
//
// grammar:
//   expr   := '-'? term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' intlit)?
//   base   := number | ident | 'sqrt' '(' expr ')'
//           | 'D' '(' name (';' name (',' name)*) ')'   (derivative leaf)
//           | '(' expr ')'
//
// identifiers are a head (letters) followed by index groups, e.g. x_1,
// xd^12, p_12, y_12^3, g_11, pd_12_34.  index tuples are unordered in the
// input: antisymmetric groups are normalized to increasing order with a
// sign flip (p_21 -> -p_12, xd^11 -> 0), the metric head g is symmetric
// (g_21 -> g_12).  '_' always extends the identifier; '^' extends it only
// where a fiber-coordinate family binds it (see ParseOptions), so that
// xd^12^2 reads as (xd^12)^2.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wedge/expr.hpp"

namespace wedge::sym {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  size_t pos;
};

// one index group of an identifier as written, e.g. {'^', "12"}
struct IndexGroup {
  char sep; // '_' or '^'
  std::string idx;
};

// A resolver adapts identifier lexing to a chart (or any symbol table).  It
// receives the head plus a candidate list of index groups and either claims
// the identifier (returning its canonical expression, possibly 0 or signed)
// or declines (nullopt -> trailing '^' groups are shed and retried, then
// default rules apply).  Unknown-symbol errors are the caller's concern:
// whoever consumes the parse validates atoms against its chart.
using SymbolResolver = std::function<std::optional<Expr>(
    const std::string& head, const std::vector<IndexGroup>& groups)>;

struct ParseOptions {
  SymbolResolver resolve; // empty: default conventions only
  // when false, '^' never extends an identifier (plain-function mode used
  // for boundary data in x,y where y^2 must mean y squared)
  bool bind_carets = true;
};

Expr parse(const std::string& text);
Expr parse(const std::string& text, const ParseOptions& opts);

// Default-convention identifier builder, also used by resolvers as a
// fallback: applies per-group antisymmetric normalization for the heads
// xd, xdd, xp, p, pd, y, z, q and symmetric normalization for g; other
// heads are taken verbatim.  Multiple same-shape groups (pd_34_12) sort
// with a transposition sign.  Exposed for tests.
Expr default_symbol(const std::string& head, const std::vector<IndexGroup>& groups);

// sorts `idx` in place, returning the permutation sign (0 on repeats when
// `antisym`, which zeroes the coordinate)
int normalize_index_string(std::string& idx, bool antisym);

} // namespace wedge::sym
