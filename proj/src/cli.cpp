#include "wedge/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "wedge/io.hpp"
#include "wedge/latex.hpp"
#include "wedge/plateau.hpp"
#include "wedge/triple.hpp"

namespace wedge::cli {

namespace {

namespace geo = wedge::geo;
namespace sy = wedge::sym;
namespace pl = wedge::plateau;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& s, size_t want,
                                  const char* what) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw std::invalid_argument(item);
  }
  if (out.size() != want)
    throw std::invalid_argument(std::string(what) + ": expected " +
                                std::to_string(want) + " comma-separated values");
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

bool file_exists(const std::string& path) {
  return std::ifstream(path).good();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

std::string trimmed(std::string s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

// ---- derive -----------------------------------------------------------------

struct DeriveConfig {
  int dim = 3;
  std::string metric;
  std::string lagrangian, hamiltonian, morse;
  std::string parameters;
  std::string emit = "text";
  std::string outfile;
};

void emit_text(const io::DeriveDocument& doc, bool quiet, std::ostream& out) {
  if (!quiet) {
    out << "derived equations: dim=" << doc.dim << " kind=" << doc.kind
        << " source=" << doc.source;
    if (!doc.metric.empty()) out << " metric=" << doc.metric;
    out << "\n";
  }
  auto section = [&](const char* title, const std::vector<std::string>& eqs) {
    if (eqs.empty()) return;
    out << title << ":\n";
    for (const std::string& e : eqs) out << "  0 = " << e << "\n";
  };
  section("phase base equations", doc.phase_base);
  section("phase momentum equations", doc.phase_momentum);
  section("stationarity constraints", doc.phase_constraints);
  if (!doc.legendre.empty()) {
    out << "legendre map:\n";
    for (const auto& [name, rhs] : doc.legendre)
      out << "  " << name << " = " << rhs << "\n";
  }
  if (!doc.surface_unknowns.empty()) {
    out << "surface equations for ";
    for (size_t i = 0; i < doc.surface_unknowns.size(); ++i)
      out << (i ? ", " : "") << doc.surface_unknowns[i] << "(t, s)";
    out << ":\n";
    for (const std::string& e : doc.surface_residuals) out << "  0 = " << e << "\n";
  }
  section("surface pair equations", doc.surface_pairs);
}

void emit_latex(const geo::PhaseDynamics& dyn, const geo::SurfaceSystem& surf,
                const geo::CoordMap* legendre, std::ostream& out) {
  auto block = [&](const char* title, const std::vector<sy::Expr>& eqs) {
    if (eqs.empty()) return;
    out << "% " << title << "\n";
    for (const sy::Expr& e : eqs) out << "\\[ 0 = " << sy::to_latex(e) << " \\]\n";
  };
  block("phase base equations", dyn.base_residuals);
  block("phase momentum equations", dyn.momentum_residuals);
  block("stationarity constraints", dyn.constraints);
  if (legendre) {
    out << "% legendre map\n";
    for (const auto& coord : legendre->target.coords())
      if (!coord.parents.empty())
        out << "\\[ " << sy::latex_name(coord.name) << " = "
            << sy::to_latex(legendre->entry(coord.name)) << " \\]\n";
  }
  block("surface equations", surf.residuals);
  block("surface pair equations", surf.pair_residuals);
}

int run_derive(const DeriveConfig& cfg, bool quiet, std::ostream& out,
               std::ostream& err) {
  int sources = (int)!cfg.lagrangian.empty() + (int)!cfg.hamiltonian.empty() +
                (int)!cfg.morse.empty();
  if (sources != 1) {
    err << "derive: exactly one of --lagrangian, --hamiltonian, "
           "--morse-family is required\n";
    return 2;
  }
  std::string text = !cfg.lagrangian.empty()
                         ? cfg.lagrangian
                         : (!cfg.hamiltonian.empty() ? cfg.hamiltonian : cfg.morse);
  if (file_exists(text)) text = slurp(text);
  text = trimmed(text);

  io::Problem problem;
  if (!text.empty() && text.front() == '{') {
    // a JSON problem file carries its own dim / metric / generator kind
    problem = io::problem_from_json(text);
  } else {
    problem.dim = cfg.dim;
    problem.source = text;
    if (!cfg.lagrangian.empty())
      problem.kind = io::Problem::Kind::lagrangian;
    else if (!cfg.hamiltonian.empty())
      problem.kind = io::Problem::Kind::hamiltonian;
    else {
      problem.kind = io::Problem::Kind::morse_family;
      problem.parameters = split_list(cfg.parameters);
      if (problem.parameters.empty()) {
        if (!io::is_builtin_generator(text)) {
          err << "derive: an inline morse family needs --parameters\n";
          return 2;
        }
        problem.parameters = {"r"};
      }
    }
    if (!cfg.metric.empty()) {
      problem.metric_name = cfg.metric;
      problem.metric = io::named_metric(cfg.metric, problem.dim);
    }
  }

  geo::PhaseDynamics dyn;
  geo::SurfaceSystem surf;
  std::optional<geo::CoordMap> legendre;
  switch (problem.kind) {
    case io::Problem::Kind::lagrangian: {
      geo::Lagrangian L = io::lagrangian_of(problem);
      dyn = geo::lagrange_phase(L);
      surf = geo::euler_lagrange_residual(L);
      legendre = geo::legendre_map(L);
      break;
    }
    case io::Problem::Kind::hamiltonian: {
      geo::Hamiltonian H = io::hamiltonian_of(problem);
      dyn = geo::hamilton_phase(H);
      surf = geo::hamilton_surface_system(H);
      break;
    }
    case io::Problem::Kind::morse_family: {
      geo::Hamiltonian F = io::hamiltonian_of(problem);
      dyn = geo::morse_family_phase(F);
      // the family's momenta are parametrized; no surface block is emitted
      break;
    }
  }

  std::ofstream file;
  if (!cfg.outfile.empty()) {
    file.open(cfg.outfile);
    if (!file) {
      err << "derive: cannot write " << cfg.outfile << "\n";
      return 2;
    }
  }
  std::ostream& sink = cfg.outfile.empty() ? out : file;

  if (cfg.emit == "json") {
    sink << io::to_json(io::make_document(problem, dyn, surf,
                                          legendre ? &*legendre : nullptr))
         << "\n";
  } else if (cfg.emit == "latex") {
    emit_latex(dyn, surf, legendre ? &*legendre : nullptr, sink);
  } else {
    emit_text(io::make_document(problem, dyn, surf,
                                legendre ? &*legendre : nullptr),
              quiet, sink);
  }
  return 0;
}

// ---- identities ---------------------------------------------------------------

int run_identities(int n, int dim, bool quiet, std::ostream& out,
                   std::ostream& err) {
  if (!quiet)
    out << "canonical morphism identities (n=" << n << ", dim=" << dim << ")\n";
  geo::TripleReport rep = geo::verify_triple(geo::base_chart(dim), n);
  auto row = [&](const char* label, bool ok) {
    out << label << std::string(60 - std::strlen(label), ' ')
        << (ok ? "PASS" : "FAIL") << "\n";
  };
  row("alpha: canonical two-form pulls back to the lifted two-form",
      rep.alpha_symplectic);
  row("beta:  canonical two-form pulls back to the lifted two-form",
      rep.beta_symplectic);
  row("alpha: liouville form pulls back to the signed lifted form",
      rep.alpha_liouville);
  row("beta:  liouville form pulls back to the contracted form",
      rep.beta_liouville);
  if (!rep.pass())
    for (const std::string& m : rep.mismatches) err << "mismatch: " << m << "\n";
  return rep.pass() ? 0 : 1;
}

// ---- plateau ------------------------------------------------------------------

struct PlateauConfig {
  std::string domain = "-1,1,-1,1";
  std::string grid = "33,33";
  std::string boundary = "0";
  double tol = 1e-10;
  int maxiter = 50;
  std::string outcsv;
  std::string gnuplot;
};

// nearest-sample lookup over a CSV of x,y,z rows (header line optional); the
// file written by --out round-trips as boundary input for the same grid
std::function<double(double, double)> boundary_from_csv(const std::string& path,
                                                        double hmin) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot read boundary file: " + path);
  struct Sample {
    double x, y, z;
  };
  std::vector<Sample> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, y, z;
    if (ss >> x >> y >> z) rows.push_back({x, y, z});
  }
  if (rows.empty())
    throw std::invalid_argument("boundary file has no x,y,z rows: " + path);
  double tol2 = 1e-12 * hmin * hmin;
  return [rows, tol2](double x, double y) {
    double best = std::numeric_limits<double>::max(), z = 0;
    for (const Sample& s : rows) {
      double d = (s.x - x) * (s.x - x) + (s.y - y) * (s.y - y);
      if (d < best) {
        best = d;
        z = s.z;
      }
    }
    if (best > tol2)
      throw std::invalid_argument("boundary file does not cover the grid edge");
    return z;
  };
}

int run_plateau(const PlateauConfig& cfg, bool quiet, std::ostream& out,
                std::ostream& err) {
  std::vector<double> dom = parse_doubles(cfg.domain, 4, "--domain");
  std::vector<double> gd = parse_doubles(cfg.grid, 2, "--grid");
  int nx = (int)gd[0], ny = (int)gd[1];
  if (nx != gd[0] || ny != gd[1])
    throw std::invalid_argument("--grid: point counts must be integers");
  if (!cfg.gnuplot.empty() && cfg.outcsv.empty()) {
    err << "plateau: --gnuplot needs --out for the data file\n";
    return 2;
  }

  std::function<double(double, double)> boundary;
  if (file_exists(cfg.boundary)) {
    double hmin = std::min((dom[1] - dom[0]) / std::max(nx - 1, 1),
                           (dom[3] - dom[2]) / std::max(ny - 1, 1));
    boundary = boundary_from_csv(cfg.boundary, hmin);
  } else {
    sy::ParseOptions plain;
    plain.bind_carets = false; // y^2 is y squared here, not an indexed name
    sy::Expr e = sy::parse(cfg.boundary, plain);
    for (const sy::AtomKey& a : sy::atoms(e))
      if (a.name != "x" && a.name != "y")
        throw std::invalid_argument("boundary expression may use x and y only, got " +
                                    sy::atom_name(a));
    boundary = [e](double x, double y) {
      sy::VarAssignment a;
      a.set("x", x);
      a.set("y", y);
      return sy::eval_double(e, a);
    };
  }

  pl::SolverGrid g = pl::make_grid(dom[0], dom[1], dom[2], dom[3], nx, ny, boundary);
  pl::SolveReport rep = pl::solve(g, cfg.tol, cfg.maxiter);
  if (!quiet)
    out << "plateau: grid=" << nx << "x" << ny << " kernel=" << pl::kernel_name()
        << " iterations=" << rep.iterations
        << " residual=" << fmt(rep.residual_norm)
        << " wall=" << fmt(rep.wall_seconds) << "s"
        << " converged=" << (rep.converged ? "yes" : "no") << "\n";
  if (!cfg.outcsv.empty()) pl::write_csv(g, cfg.outcsv);
  if (!cfg.gnuplot.empty()) pl::write_gnuplot(cfg.outcsv, cfg.gnuplot);
  if (!rep.converged) err << "plateau: no convergence after " << rep.iterations
                          << " iterations\n";
  return rep.converged ? 0 : 1;
}

// ---- check ----------------------------------------------------------------------

int run_check(unsigned seed, int samples, int gridn, bool quiet,
              std::ostream& out, std::ostream& err) {
  (void)quiet;
  geo::MinimalSurfaceReport rep =
      geo::el_vs_minimal_surface_consistency(seed, samples);
  out << "surface-equation consistency: samples=" << rep.samples
      << " e1=" << fmt(rep.max_e1) << " e2=" << fmt(rep.max_e2)
      << " e3=" << fmt(rep.max_e3) << " ratio_dev=" << fmt(rep.max_ratio_dev)
      << " equivalence=" << (rep.equivalence ? "yes" : "no") << " -> "
      << (rep.pass() ? "PASS" : "FAIL") << "\n";

  pl::SolverGrid g =
      pl::make_grid(-0.4, 0.4, -0.4, 0.4, gridn, gridn, [](double x, double y) {
        return std::log(std::cos(x) / std::cos(y));
      });
  pl::SolveReport srep = pl::solve(g, 1e-10, 30);
  pl::CrossCheckReport cc = pl::cross_check_with_symbolic(g);
  bool plateau_ok = srep.converged && cc.pass();
  out << "plateau cross-check: grid=" << gridn << "x" << gridn
      << " converged=" << (srep.converged ? "yes" : "no")
      << " nodes=" << cc.nodes << " max_rel_dev=" << fmt(cc.max_rel_dev)
      << " -> " << (plateau_ok ? "PASS" : "FAIL") << "\n";

  if (!rep.pass() || !plateau_ok) {
    err << "check: verification failed\n";
    return 1;
  }
  return 0;
}

} // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"bivector bundles, their canonical triple, and the phase "
               "dynamics of strings"};
  app.name("wedge");
  app.require_subcommand(1);

  unsigned seed = 0;
  int threads = 1;
  bool quiet = false;
  app.add_option("--seed", seed, "seed for sampling checks");
  app.add_option("--threads", threads, "worker cap (reserved; modules are single-threaded)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet,-q", quiet, "suppress informational headers");

  DeriveConfig dc;
  CLI::App* derive = app.add_subcommand(
      "derive", "derive phase and surface equations from a generating function");
  derive->fallthrough();
  derive->add_option("--dim", dc.dim, "base dimension")->check(CLI::Range(2, 9));
  derive->add_option("--metric", dc.metric, "euclidean | minkowski");
  derive->add_option("--lagrangian", dc.lagrangian,
                     "builtin (nambu-goto, quadratic), inline expression, or file");
  derive->add_option("--hamiltonian", dc.hamiltonian,
                     "inline expression or file");
  derive->add_option("--morse-family", dc.morse,
                     "builtin (nambu-goto), inline expression, or file");
  derive->add_option("--parameters", dc.parameters,
                     "comma-separated stationarity variables for --morse-family");
  derive->add_option("--emit", dc.emit, "output format")
      ->check(CLI::IsMember({"text", "latex", "json"}));
  derive->add_option("--out", dc.outfile, "write to a file instead of stdout");

  int id_n = 2, id_dim = 3;
  CLI::App* ident = app.add_subcommand(
      "identities", "verify the pullback identities of the canonical morphisms");
  ident->fallthrough();
  ident->add_option("--n", id_n, "lift order")->check(CLI::Range(1, 4));
  ident->add_option("--dim", id_dim, "base dimension")->check(CLI::Range(2, 9));

  PlateauConfig pc;
  CLI::App* plat = app.add_subcommand(
      "plateau", "solve the minimal-surface equation on a rectangle");
  plat->fallthrough();
  plat->add_option("--domain", pc.domain, "x0,x1,y0,y1");
  plat->add_option("--grid", pc.grid, "nx,ny");
  plat->add_option("--boundary", pc.boundary,
                   "expression in x, y or a CSV file of x,y,z samples");
  plat->add_option("--tol", pc.tol, "residual max-norm target")
      ->check(CLI::PositiveNumber);
  plat->add_option("--maxiter", pc.maxiter, "newton iteration cap")
      ->check(CLI::PositiveNumber);
  plat->add_option("--out", pc.outcsv, "write the solved grid as CSV");
  plat->add_option("--gnuplot", pc.gnuplot, "write a gnuplot script for --out");

  int samples = 1000, gridn = 33;
  CLI::App* chk = app.add_subcommand(
      "check", "run the surface-equation consistency suite end to end");
  chk->fallthrough();
  chk->add_option("--samples", samples, "random jets to test")
      ->check(CLI::PositiveNumber);
  chk->add_option("--grid", gridn, "plateau cross-check grid size")
      ->check(CLI::Range(5, 200));

  try {
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (derive->parsed()) return run_derive(dc, quiet, out, err);
    if (ident->parsed()) return run_identities(id_n, id_dim, quiet, out, err);
    if (plat->parsed()) return run_plateau(pc, quiet, out, err);
    if (chk->parsed()) return run_check(seed, samples, gridn, quiet, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int run(std::vector<std::string> args) {
  return run(std::move(args), std::cout, std::cerr);
}

} // namespace wedge::cli
