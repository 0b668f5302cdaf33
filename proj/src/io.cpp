#include "wedge/io.hpp"

#include <stdexcept>

#include "json.hpp"
#include "wedge/parse.hpp"

namespace wedge::io {

using nlohmann::json;
namespace sy = wedge::sym;
namespace geo = wedge::geo;

namespace {

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string(what) + ": " + e.what());
  }
}

// metric matrices carry expression strings so exact rationals survive
json metric_to_json(const geo::Metric& g) {
  json rows = json::array();
  for (const auto& row : g) {
    json r = json::array();
    for (const auto& entry : row) r.push_back(sy::to_string(entry));
    rows.push_back(r);
  }
  return rows;
}

geo::Metric metric_from_json(const json& rows, int dim) {
  if (!rows.is_array() || (int)rows.size() != dim)
    throw std::invalid_argument("metric matrix must have one row per dimension");
  geo::Metric g(dim, std::vector<sy::Expr>(dim));
  for (int i = 0; i < dim; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || (int)row.size() != dim)
      throw std::invalid_argument("metric matrix must be square");
    for (int j = 0; j < dim; ++j)
      g[i][j] = sy::parse(row[j].get<std::string>());
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (!sy::identical(g[i][j], g[j][i]))
        throw std::invalid_argument("metric must be symmetric");
  return g;
}

std::vector<std::string> string_list(const json& j, const char* what) {
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + " must be an array");
  std::vector<std::string> out;
  for (const auto& entry : j) out.push_back(entry.get<std::string>());
  return out;
}

} // namespace

// ---- chart descriptors ------------------------------------------------------

std::string to_json(const ChartSpec& spec) {
  json doc{{"base_dim", spec.names.size()},
           {"names", spec.names},
           {"functors", spec.functors},
           {"label", spec.label}};
  return doc.dump(2);
}

ChartSpec chart_spec_from_json(const std::string& text) {
  json doc = parse_json(text, "chart descriptor");
  ChartSpec spec;
  spec.names = string_list(doc.at("names"), "names");
  if (spec.names.empty())
    throw std::invalid_argument("chart descriptor needs at least one name");
  if (doc.contains("base_dim") &&
      doc["base_dim"].get<size_t>() != spec.names.size())
    throw std::invalid_argument("base_dim disagrees with the name list");
  if (doc.contains("functors"))
    spec.functors = string_list(doc["functors"], "functors");
  if (doc.contains("label")) spec.label = doc["label"].get<std::string>();
  return spec;
}

geo::Chart build_chart(const ChartSpec& spec) {
  geo::Chart c = geo::base_chart(spec.names, spec.label);
  for (const std::string& tok : spec.functors) {
    if (tok == "T") {
      c = geo::tangent(c);
    } else if (tok == "T*") {
      c = geo::cotangent(c);
    } else if (tok.size() >= 2 && tok[0] == '^' && tok[1] >= '1' &&
               tok[1] <= '9') {
      int n = tok[1] - '0';
      std::string rest = tok.substr(2);
      if (rest == "T")
        c = geo::wedge_tangent(n, c);
      else if (rest == "T*")
        c = geo::wedge_cotangent(n, c);
      else
        throw std::invalid_argument("unknown functor token: " + tok);
    } else {
      throw std::invalid_argument("unknown functor token: " + tok);
    }
  }
  return c;
}

// ---- forms ------------------------------------------------------------------

std::string to_json(const geo::Form& a) {
  json terms = json::array();
  for (const auto& [tuple, coeff] : a.stored()) {
    json names = json::array();
    for (int pos : tuple) names.push_back(a.chart().coord(pos).name);
    terms.push_back(json{{"indices", names},
                         {"coefficient", sy::to_string(coeff)}});
  }
  return terms.dump(2);
}

geo::Form form_from_json(const geo::Chart& chart, int degree,
                         const std::string& text) {
  json doc = parse_json(text, "form");
  if (!doc.is_array()) throw std::invalid_argument("form must be a JSON array");
  geo::Form out(chart, degree);
  for (const auto& term : doc) {
    std::vector<std::string> names = string_list(term.at("indices"), "indices");
    std::vector<int> tuple;
    for (const std::string& name : names) {
      int pos = chart.position(name);
      if (pos < 0)
        throw std::invalid_argument("unknown coordinate in form: " + name);
      tuple.push_back(pos);
    }
    out.add_term(tuple, chart.parse(term.at("coefficient").get<std::string>()));
  }
  return out;
}

// ---- problem envelope -------------------------------------------------------

geo::Metric named_metric(const std::string& name, int dim) {
  if (name == "euclidean") return geo::euclidean_metric(dim);
  if (name == "minkowski") return geo::minkowski_metric(dim);
  throw std::invalid_argument("unknown metric: " + name +
                              " (builtins: euclidean, minkowski)");
}

bool is_builtin_generator(const std::string& name) {
  return name == "nambu-goto" || name == "quadratic";
}

Problem problem_from_json(const std::string& text) {
  json doc = parse_json(text, "problem");
  Problem p;
  p.dim = doc.at("dim").get<int>();
  if (p.dim < 2 || p.dim > 9)
    throw std::invalid_argument("dim must lie in 2..9");

  if (doc.contains("metric")) {
    const json& m = doc["metric"];
    if (m.is_string()) {
      p.metric_name = m.get<std::string>();
      p.metric = named_metric(p.metric_name, p.dim);
    } else {
      p.metric = metric_from_json(m, p.dim);
    }
  }

  int generators = (int)doc.contains("lagrangian") +
                   (int)doc.contains("hamiltonian") +
                   (int)doc.contains("morse_family");
  if (generators != 1)
    throw std::invalid_argument(
        "exactly one of lagrangian, hamiltonian, morse_family is required");

  if (doc.contains("lagrangian")) {
    p.kind = Problem::Kind::lagrangian;
    p.source = doc["lagrangian"].get<std::string>();
  } else if (doc.contains("hamiltonian")) {
    p.kind = Problem::Kind::hamiltonian;
    p.source = doc["hamiltonian"].get<std::string>();
  } else {
    p.kind = Problem::Kind::morse_family;
    const json& mf = doc["morse_family"];
    if (mf.is_string()) {
      p.source = mf.get<std::string>();
      if (!is_builtin_generator(p.source))
        throw std::invalid_argument(
            "inline morse family needs {source, parameters}");
      p.parameters = {"r"};
    } else {
      p.source = mf.at("source").get<std::string>();
      p.parameters = string_list(mf.at("parameters"), "parameters");
    }
  }
  return p;
}

std::string to_json(const Problem& p) {
  json doc{{"dim", p.dim}};
  if (!p.metric_name.empty())
    doc["metric"] = p.metric_name;
  else if (!p.metric.empty())
    doc["metric"] = metric_to_json(p.metric);
  switch (p.kind) {
    case Problem::Kind::lagrangian:
      doc["lagrangian"] = p.source;
      break;
    case Problem::Kind::hamiltonian:
      doc["hamiltonian"] = p.source;
      break;
    case Problem::Kind::morse_family:
      doc["morse_family"] = json{{"source", p.source},
                                 {"parameters", p.parameters}};
      break;
  }
  return doc.dump(2);
}

geo::Lagrangian lagrangian_of(const Problem& p) {
  if (p.kind != Problem::Kind::lagrangian)
    throw std::invalid_argument("problem does not declare a lagrangian");
  geo::Chart base = geo::base_chart(p.dim);
  if (p.source == "nambu-goto") {
    geo::Metric g =
        p.metric.empty() ? geo::euclidean_metric(p.dim) : p.metric;
    return geo::nambu_goto(base, g);
  }
  if (p.source == "quadratic")
    return geo::quadratic_lagrangian(base, p.metric);
  geo::Chart dom = geo::wedge_tangent(2, base);
  return geo::make_lagrangian(base, dom.parse(p.source), p.metric);
}

geo::Hamiltonian hamiltonian_of(const Problem& p) {
  geo::Chart base = geo::base_chart(p.dim);
  if (p.kind == Problem::Kind::lagrangian)
    throw std::invalid_argument("problem declares a lagrangian");
  if (p.kind == Problem::Kind::hamiltonian) {
    if (is_builtin_generator(p.source))
      throw std::invalid_argument(
          "no builtin plain hamiltonians; use a morse_family");
    geo::Chart dom = geo::wedge_cotangent(2, base);
    return geo::make_hamiltonian(base, dom.parse(p.source));
  }
  if (p.source == "nambu-goto") {
    geo::Metric g =
        p.metric.empty() ? geo::euclidean_metric(p.dim) : p.metric;
    return geo::nambu_goto_family(base, g);
  }
  geo::Chart dom = geo::wedge_cotangent(2, base);
  return geo::make_morse_family(base, dom.parse(p.source), p.parameters);
}

// ---- derived-equation document ----------------------------------------------

DeriveDocument make_document(const Problem& p, const geo::PhaseDynamics& dyn,
                             const geo::SurfaceSystem& surf,
                             const geo::CoordMap* legendre) {
  DeriveDocument doc;
  doc.dim = p.dim;
  switch (p.kind) {
    case Problem::Kind::lagrangian: doc.kind = "lagrangian"; break;
    case Problem::Kind::hamiltonian: doc.kind = "hamiltonian"; break;
    case Problem::Kind::morse_family: doc.kind = "morse_family"; break;
  }
  doc.source = p.source;
  doc.metric = p.metric_name;
  doc.parameters = p.parameters;

  for (const auto& r : dyn.base_residuals)
    doc.phase_base.push_back(sy::to_string(r));
  for (const auto& r : dyn.momentum_residuals)
    doc.phase_momentum.push_back(sy::to_string(r));
  for (const auto& r : dyn.constraints)
    doc.phase_constraints.push_back(sy::to_string(r));

  if (legendre) {
    for (const auto& coord : legendre->target.coords())
      if (!coord.parents.empty())
        doc.legendre[coord.name] = sy::to_string(legendre->entry(coord.name));
  }

  doc.surface_unknowns = surf.unknowns;
  for (const auto& r : surf.residuals)
    doc.surface_residuals.push_back(sy::to_string(r));
  for (const auto& r : surf.pair_residuals)
    doc.surface_pairs.push_back(sy::to_string(r));
  return doc;
}

std::string to_json(const DeriveDocument& doc) {
  json phase{{"base", doc.phase_base}, {"momentum", doc.phase_momentum}};
  if (!doc.phase_constraints.empty())
    phase["constraints"] = doc.phase_constraints;

  json surface{{"unknowns", doc.surface_unknowns},
               {"residuals", doc.surface_residuals}};
  if (!doc.surface_pairs.empty()) surface["pair_residuals"] = doc.surface_pairs;

  json out{{"dim", doc.dim},
           {"kind", doc.kind},
           {"source", doc.source},
           {"phase", phase},
           {"surface", surface}};
  if (!doc.metric.empty()) out["metric"] = doc.metric;
  if (!doc.parameters.empty()) out["parameters"] = doc.parameters;
  if (!doc.legendre.empty()) {
    json leg = json::object();
    for (const auto& [name, entry] : doc.legendre) leg[name] = entry;
    out["legendre"] = leg;
  }
  return out.dump(2);
}

DeriveDocument derive_document_from_json(const std::string& text) {
  json doc = parse_json(text, "derive document");
  DeriveDocument out;
  out.dim = doc.at("dim").get<int>();
  out.kind = doc.at("kind").get<std::string>();
  out.source = doc.at("source").get<std::string>();
  if (doc.contains("metric")) out.metric = doc["metric"].get<std::string>();
  if (doc.contains("parameters"))
    out.parameters = string_list(doc["parameters"], "parameters");

  const json& phase = doc.at("phase");
  out.phase_base = string_list(phase.at("base"), "phase.base");
  out.phase_momentum = string_list(phase.at("momentum"), "phase.momentum");
  if (phase.contains("constraints"))
    out.phase_constraints = string_list(phase["constraints"], "constraints");

  if (doc.contains("legendre"))
    for (const auto& [name, entry] : doc["legendre"].items())
      out.legendre[name] = entry.get<std::string>();

  const json& surface = doc.at("surface");
  out.surface_unknowns = string_list(surface.at("unknowns"), "unknowns");
  out.surface_residuals = string_list(surface.at("residuals"), "residuals");
  if (surface.contains("pair_residuals"))
    out.surface_pairs = string_list(surface["pair_residuals"], "pair_residuals");
  return out;
}

} // namespace wedge::io
