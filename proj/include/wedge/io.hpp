#pragma once

// JSON exchange formats: chart descriptors, forms, problem envelopes and the
// derived-equation document emitted by `derive --emit json`.
//
// Expressions travel as canonical strings (to_string / parse are exact
// inverses), so a re-parsed document compares `identical` to the in-memory
// one.  The JSON library stays out of this header on purpose; everything is
// string-in / string-out.

#include <map>
#include <string>
#include <vector>

#include "wedge/dynamics.hpp"

namespace wedge::io {

// ---- chart descriptors ------------------------------------------------------
// {base_dim, names, functors, label?}; functor tokens are applied left to
// right: "T", "T*", "^nT", "^nT*" (n a digit >= 1)
struct ChartSpec {
  std::vector<std::string> names;
  std::string label = "M";
  std::vector<std::string> functors;
};
std::string to_json(const ChartSpec& spec);
ChartSpec chart_spec_from_json(const std::string& text);
geo::Chart build_chart(const ChartSpec& spec);

// ---- forms ------------------------------------------------------------------
// a JSON array [{indices: [coordinate names], coefficient: "<expr>"}, ...];
// reading resolves names against the supplied chart
std::string to_json(const geo::Form& a);
geo::Form form_from_json(const geo::Chart& chart, int degree,
                         const std::string& text);

// ---- problem envelope -------------------------------------------------------
// {dim, metric?, lagrangian? | hamiltonian? | morse_family?}
//   metric: "euclidean" | "minkowski" | matrix of expression strings
//   lagrangian / hamiltonian: builtin name or inline expression
//   morse_family: {source, parameters} or a builtin name
struct Problem {
  enum class Kind { lagrangian, hamiltonian, morse_family };
  int dim = 0;
  Kind kind = Kind::lagrangian;
  std::string source;                  // builtin name or inline expression
  std::vector<std::string> parameters; // morse_family stationarity variables
  std::string metric_name;             // builtin name, "" when explicit/absent
  geo::Metric metric;                  // resolved matrix, empty when absent
};
Problem problem_from_json(const std::string& text);
std::string to_json(const Problem& p);

// builtin lookups; named_metric throws std::invalid_argument on unknown names
geo::Metric named_metric(const std::string& name, int dim);
bool is_builtin_generator(const std::string& name);

// instantiate the generating function (builtin or parsed inline on the
// matching chart); throws std::invalid_argument on a kind mismatch
geo::Lagrangian lagrangian_of(const Problem& p);
geo::Hamiltonian hamiltonian_of(const Problem& p);

// ---- derived-equation document ----------------------------------------------
struct DeriveDocument {
  int dim = 0;
  std::string kind;   // "lagrangian" | "hamiltonian" | "morse_family"
  std::string source;
  std::string metric; // builtin name or "" (explicit matrices stay in Problem)
  std::vector<std::string> parameters;

  std::vector<std::string> phase_base;
  std::vector<std::string> phase_momentum;
  std::vector<std::string> phase_constraints;
  std::map<std::string, std::string> legendre; // momentum name -> expression

  std::vector<std::string> surface_unknowns;
  std::vector<std::string> surface_residuals;
  std::vector<std::string> surface_pairs;
};
DeriveDocument make_document(const Problem& p, const geo::PhaseDynamics& dyn,
                             const geo::SurfaceSystem& surf,
                             const geo::CoordMap* legendre = nullptr);
std::string to_json(const DeriveDocument& doc);
DeriveDocument derive_document_from_json(const std::string& text);

} // namespace wedge::io
