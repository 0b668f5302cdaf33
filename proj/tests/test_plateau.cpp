#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "wedge/plateau.hpp"

using namespace wedge::plateau;

namespace {

double scherk(double x, double y) { return std::log(std::cos(x) / std::cos(y)); }

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// worst interior deviation from a reference surface
double max_err(const SolverGrid& g, double (*f)(double, double)) {
  double m = 0;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i)
      m = std::max(m, std::abs(g.at(i, j) - f(g.x(i), g.y(j))));
  return m;
}

SolverGrid scherk_grid(int n) {
  return make_grid(-0.4, 0.4, -0.4, 0.4, n, n, scherk);
}

} // namespace

TEST_CASE("stencil residual on exact data") {
  // planes are in the kernel of every stencil combination
  SolverGrid plane = make_grid(-1, 2, 0, 1, 17, 9, [](double x, double y) {
    return 3 * x - 2 * y + 1;
  });
  for (int j = 1; j < plane.ny - 1; ++j)
    for (int i = 1; i < plane.nx - 1; ++i)
      plane.at(i, j) = 3 * plane.x(i) - 2 * plane.y(j) + 1;
  CHECK(max_abs(residual(plane)) <= 1e-12);

  // z = x^2: z_y = z_yy = z_xy = 0 and z_xx = 2 exactly, so the residual is
  // the constant 2
  SolverGrid par = make_grid(-1, 1, -1, 1, 9, 11, [](double x, double) {
    return x * x;
  });
  for (int j = 1; j < par.ny - 1; ++j)
    for (int i = 1; i < par.nx - 1; ++i) par.at(i, j) = par.x(i) * par.x(i);
  for (double r : residual(par)) CHECK(r == doctest::Approx(2.0).epsilon(1e-12));

  // analytic minimal surface: only truncation remains, which is O(h^2)
  SolverGrid s17 = scherk_grid(17), s33 = scherk_grid(33);
  for (SolverGrid* s : {&s17, &s33})
    for (int j = 1; j < s->ny - 1; ++j)
      for (int i = 1; i < s->nx - 1; ++i)
        s->at(i, j) = scherk(s->x(i), s->y(j));
  double r17 = max_abs(residual(s17)), r33 = max_abs(residual(s33));
  CHECK(r17 <= 1e-2);
  CHECK(r17 / r33 >= 3.0);
  CHECK(r17 / r33 <= 5.0);
}

TEST_CASE("kernel flavors agree bitwise") {
  std::mt19937_64 rng(0xBEEFULL);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  SolverGrid g = make_grid(-1, 1, -1, 1, 37, 23, [](double, double) {
    return 0.0;
  });
  for (double& z : g.z) z = U(rng);

  force_scalar_kernels(true);
  CHECK(std::string(kernel_name()) == "scalar");
  std::vector<double> ref = residual(g);
  force_scalar_kernels(false);
  std::vector<double> fast = residual(g);

  REQUIRE(ref.size() == fast.size());
  for (size_t k = 0; k < ref.size(); ++k) CHECK(ref[k] == fast[k]);
  INFO("active kernel: ", kernel_name());
}

TEST_CASE("plane boundary is reproduced immediately") {
  SolverGrid g = make_grid(-1, 1, -1, 1, 21, 21, [](double x, double y) {
    return 0.5 * x + 2 * y - 3;
  });
  SolveReport rep = solve(g, 1e-10, 20);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 2);
  double err = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      err = std::max(err, std::abs(g.at(i, j) - (0.5 * g.x(i) + 2 * g.y(j) - 3)));
  CHECK(err <= 1e-12);
}

TEST_CASE("scherk benchmark converges at second order") {
  double errs[3];
  int sizes[3] = {17, 33, 65};
  for (int k = 0; k < 3; ++k) {
    SolverGrid g = scherk_grid(sizes[k]);
    SolveReport rep = solve(g, 1e-10, 30);
    REQUIRE(rep.converged);
    CHECK(rep.residual_norm <= 1e-10);
    errs[k] = max_err(g, scherk);
  }
  // halving h cuts the error by ~4
  CHECK(errs[0] / errs[1] >= 3.2);
  CHECK(errs[0] / errs[1] <= 4.8);
  CHECK(errs[1] / errs[2] >= 3.2);
  CHECK(errs[1] / errs[2] <= 4.8);
  // observed order from the three-grid ladder
  double p = std::log2(errs[0] / errs[1]);
  CHECK(std::abs(p - 2.0) <= 0.3);
}

TEST_CASE("non-minimal boundary data moves the interior") {
  SolverGrid g = make_grid(-1, 1, -1, 1, 33, 33, [](double x, double) {
    return x * x;
  });
  SolveReport rep = solve(g, 1e-10, 30);
  CHECK(rep.converged);
  CHECK(max_abs(residual(g)) <= 1e-10);
  // the paraboloid is not minimal: the solution must leave it
  double dev = 0;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i)
      dev = std::max(dev, std::abs(g.at(i, j) - g.x(i) * g.x(i)));
  CHECK(dev > 1e-3);
}

TEST_CASE("accepted newton steps never increase the residual") {
  SolverGrid g = scherk_grid(33);
  SolveReport rep = solve(g, 1e-10, 30);
  REQUIRE(rep.converged);
  REQUIRE(rep.residual_history.size() >= 2);
  for (size_t k = 1; k < rep.residual_history.size(); ++k)
    CHECK(rep.residual_history[k] < rep.residual_history[k - 1]);
  for (double lam : rep.damping_history) {
    CHECK(lam > 0.0);
    CHECK(lam <= 1.0);
  }
  CHECK(rep.wall_seconds >= 0.0);
}

TEST_CASE("stencil residual agrees with the derived surface equation") {
  // converged grid: both pipelines vanish together
  SolverGrid g = scherk_grid(33);
  REQUIRE(solve(g, 1e-10, 30).converged);
  CrossCheckReport cc = cross_check_with_symbolic(g);
  CHECK(cc.nodes == 29 * 29);
  CHECK(cc.pass());

  // plane grid: both residuals are exactly zero
  SolverGrid pl = make_grid(-1, 1, -1, 1, 17, 17, [](double x, double y) {
    return x - y;
  });
  CrossCheckReport ccp = cross_check_with_symbolic(pl);
  CHECK(ccp.max_stencil_residual == 0.0);
  CHECK(ccp.pass());

  // a bump makes both residuals visibly nonzero, still in lockstep
  SolverGrid bumped = g;
  bumped.at(bumped.nx / 2, bumped.ny / 2) += 1e-3;
  CrossCheckReport ccb = cross_check_with_symbolic(bumped);
  CHECK(ccb.max_stencil_residual > 1e-2);
  CHECK(ccb.pass());
}

TEST_CASE("csv and gnuplot emission") {
  SolverGrid g = make_grid(0, 1, 0, 1, 5, 4, [](double x, double y) {
    return x + y;
  });
  std::string csv = "/tmp/wedge_plateau_test.csv";
  std::string gp = "/tmp/wedge_plateau_test.gp";
  write_csv(g, csv);
  write_gnuplot(csv, gp);

  std::ifstream f(csv);
  REQUIRE(f.good());
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line == "x,y,z");
  int rows = 0;
  double lx = 0, ly = 0, lz = 0;
  while (std::getline(f, line)) {
    ++rows;
    std::istringstream ss(line);
    char comma;
    ss >> lx >> comma >> ly >> comma >> lz;
  }
  CHECK(rows == 5 * 4);
  CHECK(lx == doctest::Approx(1.0));
  CHECK(ly == doctest::Approx(1.0));
  CHECK(lz == doctest::Approx(2.0));

  std::ifstream gf(gp);
  REQUIRE(gf.good());
  std::stringstream buf;
  buf << gf.rdbuf();
  CHECK(buf.str().find(csv) != std::string::npos);
  std::remove(csv.c_str());
  std::remove(gp.c_str());
}

TEST_CASE("grid construction is validated") {
  auto flat = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(make_grid(0, 1, 0, 1, 2, 5, flat), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0, 1, 0, 1, 5, 2, flat), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 0, 0, 1, 5, 5, flat), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0, 1, 0, 1, 5, 5,
                            [](double, double) {
                              return std::numeric_limits<double>::quiet_NaN();
                            }),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      [] {
        SolverGrid g = make_grid(0, 1, 0, 1, 5, 5, [](double, double) {
          return 0.0;
        });
        solve(g, -1.0, 5);
      }(),
      std::invalid_argument);
}

TEST_CASE("transfinite interpolation reproduces bilinear data") {
  SolverGrid g = make_grid(-1, 2, 0, 2, 9, 7, [](double x, double y) {
    return 2 * x - y + 0.5 * x * y + 1;
  });
  // bilinear boundary data is reproduced exactly in the interior
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      double want = 2 * g.x(i) - g.y(j) + 0.5 * g.x(i) * g.y(j) + 1;
      CHECK(g.at(i, j) == doctest::Approx(want).epsilon(1e-13));
    }
}
