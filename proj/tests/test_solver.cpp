#include <doctest.h>

#include "hodomap/solver.hpp"

#include <cmath>

using namespace hodomap;

namespace {

BoundaryData middle_bump(const Domain& d, double lo = 0.25, double hi = 0.75) {
  double Ln = d.boundary().nodal_length(), L = d.boundary().length();
  double a = Ln + lo * (L - Ln), b = Ln + hi * (L - Ln);
  return unimodal_data(d, a, b, 0.5 * (a + b));
}

}  // namespace

TEST_CASE("closed-form evaluation") {
  auto y = HarmonicFunction::named("y");
  CHECK(y.value({0.3, 0.4}) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(y.gradient({0.3, 0.4}) == Point(0, 1));
  auto q = HarmonicFunction::named("im_z2");
  CHECK(q.value({1, 1}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(q.gradient({1, 1}) == Point(2, 2));
  auto x = HarmonicFunction::named("x");
  CHECK(x.value({0.7, -0.2}) == doctest::Approx(0.7));
  CHECK_THROWS_AS(HarmonicFunction::named("bogus"), Error);
}

TEST_CASE("single charge evaluation") {
  auto h = HarmonicFunction::charge_expansion({{0, 2}}, {1.0}, 0.0, 1.0);
  CHECK(h.value(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  Point g = h.gradient(0.0);
  CHECK(g.real() == doctest::Approx(0.0).scale(1));
  CHECK(g.imag() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK_THROWS_AS(h.value({0, 2}), Error);
  CHECK_THROWS_AS(h.gradient({0, 2}), Error);
}

TEST_CASE("unimodal data shape") {
  Domain h = make_halfdisk();
  double Ln = h.boundary().nodal_length();
  auto data = unimodal_data(h, Ln + 0.5, Ln + 2.0, Ln + 1.0);
  CHECK(data(Ln + 0.5) == 0.0);
  CHECK(data(Ln + 2.0) == 0.0);
  CHECK(data(Ln + 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  double prev = 0;
  for (int i = 1; i < 50; ++i) {
    double v = data(Ln + 0.5 + 0.5 * i / 50.0);
    CHECK(v > prev);
    CHECK(v < 1.0);
    prev = v;
  }
  CHECK(data.is_unimodal());
  CHECK_THROWS_AS(unimodal_data(h, Ln, Ln + 1, Ln + 0.5), Error);
  CHECK_THROWS_AS(unimodal_data(h, Ln + 0.5, h.boundary().length(), Ln + 1), Error);
  CHECK_THROWS_AS(unimodal_data(h, Ln + 0.5, Ln + 2.0, Ln + 0.5), Error);
  auto two = bump_data(h, {{Ln + 0.3, Ln + 0.6, Ln + 0.9, 1}, {Ln + 1.8, Ln + 2.1, Ln + 2.4, 1}});
  CHECK_FALSE(two.is_unimodal());
}

TEST_CASE("half-disk, trace of y") {
  Domain h = make_halfdisk();
  auto y = HarmonicFunction::named("y");
  for (std::size_t N : {64, 96}) {
    SolverConfig cfg;
    cfg.charges = N;
    auto sol = solve_dirichlet(h, y, cfg);
    double worst = 0;
    for (Point z : h.interior_samples(100, 0.0, 1)) worst = std::max(worst, std::abs(sol.function.value(z) - z.imag()));
    CHECK(worst < 1e-8);
    CHECK_FALSE(sol.report.warning);
    for (const auto& c : sol.function.charges()) {
      CHECK_FALSE(h.inside(c.at));
      CHECK(h.distance_to_boundary(c.at) >= sol.function.min_offset());
    }
  }
}

TEST_CASE("unit disk, trace of x") {
  Domain d = make_disk();
  SolverConfig cfg;
  auto sol = solve_dirichlet(d, HarmonicFunction::named("x"), cfg);
  double worst = 0;
  for (Point z : d.interior_samples(100, 0.0, 2)) worst = std::max(worst, std::abs(sol.function.value(z) - z.real()));
  CHECK(worst < 1e-8);
}

TEST_CASE("convergence from 32 to 64 charges") {
  Domain h = make_halfdisk();
  SolverConfig a, b;
  a.charges = 32;
  b.charges = 64;
  auto ra = solve_dirichlet(h, HarmonicFunction::named("y"), a).report.residual;
  auto rb = solve_dirichlet(h, HarmonicFunction::named("y"), b).report.residual;
  CHECK(rb * 10 <= ra);
}

TEST_CASE("DMO unimodal solve: positivity and maximum principle") {
  Domain d = make_graph_domain(dmo_graph(), 0.5);
  auto data = middle_bump(d);
  SolverConfig cfg;
  cfg.charges = 128;
  cfg.target = 5e-3;
  auto sol = solve_dirichlet(d, data, cfg);
  CHECK_FALSE(sol.report.warning);
  const double r = sol.report.residual;
  double lo = 1e300, hi = -1e300;
  for (Point z : d.interior_samples(1000, 0.0, 5)) {
    double v = sol.function.value(z);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(lo >= data.min_value() - r);
  CHECK(hi <= data.max_value() + r);
  int positive = 0;
  for (Point z : d.interior_samples(1000, 1e-2, 6)) positive += sol.function.value(z) > 0;
  CHECK(positive == 1000);
}

TEST_CASE("linearity on a shared charge layout") {
  Domain h = make_halfdisk();
  SolverConfig cfg;
  cfg.charges = 96;
  auto g1 = HarmonicFunction::named("y");
  auto g2 = HarmonicFunction::named("im_z2");
  auto s1 = solve_dirichlet(h, g1, cfg);
  auto s2 = solve_dirichlet(h, g2, cfg);
  auto s12 = solve_dirichlet(h, [&](Point z, double) { return 2 * g1.value(z) - 3 * g2.value(z); }, cfg);
  auto combo = s1.function.combined(2, s2.function, -3);
  double tol = 10 * std::max({s1.report.residual, s2.report.residual, s12.report.residual});
  for (Point z : h.interior_samples(100, 0.0, 7))
    CHECK(std::abs(combo.value(z) - s12.function.value(z)) <= tol);
}

TEST_CASE("gradient and harmonicity of solved functions") {
  Domain d = make_graph_domain(dmo_graph(), 0.5);
  SolverConfig cfg;
  cfg.charges = 128;
  auto sol = solve_dirichlet(d, middle_bump(d), cfg);
  auto pts = d.interior_samples(100, 1e-3, 8);
  CHECK(gradient_fd_error(sol.function, pts) < 1e-6);
  CHECK(laplacian_fd(sol.function, pts) < 1e-4);
  for (const char* name : {"y", "x", "im_z2", "re_z2", "im_z3", "re_z3"}) {
    CHECK(gradient_fd_error(HarmonicFunction::named(name), pts) < 1e-6);
    CHECK(laplacian_fd(HarmonicFunction::named(name), pts) < 1e-4);
  }
}

TEST_CASE("rank-deficient system is rejected") {
  Domain h = make_halfdisk();
  SolverConfig cfg;
  cfg.charges = 64;
  cfg.truncation = 0.5;  // discards nearly every singular value
  CHECK_THROWS_AS(solve_dirichlet(h, HarmonicFunction::named("y"), cfg), Error);
}

TEST_CASE("residual above target is a warning, not silent success") {
  Domain h = make_halfdisk();
  SolverConfig cfg;
  cfg.charges = 16;
  cfg.target = 1e-12;
  auto sol = solve_dirichlet(h, HarmonicFunction::named("y"), cfg);
  CHECK(sol.report.warning);
}
