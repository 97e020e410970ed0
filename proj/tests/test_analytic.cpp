#include <doctest.h>

#include "hodomap/analytic.hpp"

#include <cmath>

using namespace hodomap;

namespace {

Solution dmo_unimodal(std::size_t charges = 128) {
  Domain d = make_graph_domain(dmo_graph(), 0.5);
  double Ln = d.boundary().nodal_length(), L = d.boundary().length();
  double a = Ln + 0.25 * (L - Ln), b = Ln + 0.75 * (L - Ln);
  SolverConfig cfg;
  cfg.charges = charges;
  return solve_dirichlet(d, unimodal_data(d, a, b, 0.5 * (a + b)), cfg);
}

}  // namespace

TEST_CASE("conjugate of y is x") {
  Domain h = make_halfdisk();
  auto v = HarmonicFunction::named("y");
  ConjugateReport rep;
  auto vb = conjugate(v, h, &rep);
  CHECK(rep.method == ConjugateMethod::ClosedForm);
  for (Point z : h.interior_samples(50, 0, 1)) CHECK(vb.value(z) == doctest::Approx(z.real()).epsilon(1e-14));
  auto g = completion(v, vb, h);
  Point z{0.2, 0.3};
  CHECK(std::abs(g.g(z) - z) < 1e-15);
  CHECK(g.gprime(z) == Complex(1, 0));
  CHECK(g.gsecond(z) == Complex(0, 0));
}

TEST_CASE("conjugate of Im z^2 is Re z^2") {
  Domain h = make_halfdisk();
  auto v = HarmonicFunction::named("im_z2");
  auto vb = conjugate(v, h);
  for (Point z : h.interior_samples(50, 0, 2))
    CHECK(vb.value(z) == doctest::Approx(z.real() * z.real() - z.imag() * z.imag()).scale(1).epsilon(1e-14));
  auto g = completion(v, vb, h);
  CHECK(std::abs(g.gprime({1, 1}) - Complex(2, 2)) < 1e-15);
  Point z{0.3, 0.1};
  CHECK(std::abs(g.g(z) - z * z) < 1e-15);
}

TEST_CASE("single charge conjugate and completion") {
  Domain h = make_halfdisk();
  auto v = HarmonicFunction::charge_expansion({{0, 2}}, {1.0}, 0.0, 1.0);
  auto vb = conjugate(v, h);
  CHECK(std::abs(vb.value(h.anchor())) < 1e-12);
  // grad vbar = J grad v fixes the sign: vbar = -(arg(z - 2i) - arg(-2i))
  for (Point z : h.interior_samples(50, 0, 3)) {
    double expected = -(std::arg(z - Point(0, 2)) - std::arg(Point(0, -2)));
    CHECK(vb.value(z) == doctest::Approx(expected).scale(1).epsilon(1e-12));
  }
  auto g = completion(v, vb, h);
  CHECK(std::abs(g.gprime(0.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std::abs(g.gprime(0.0)) == doctest::Approx(std::abs(v.gradient(0.0))).epsilon(1e-15));
}

TEST_CASE("conjugate of a solved function on the DMO domain") {
  Domain d = make_graph_domain(dmo_graph(), 0.5);
  auto sol = dmo_unimodal();
  ConjugateReport rep;
  auto vb = conjugate(sol.function, d, &rep);
  CHECK(rep.method != ConjugateMethod::ClosedForm);
  CHECK(std::abs(vb.value(d.anchor())) < 1e-8);
  CompletionReport crep;
  auto g = completion(sol.function, vb, d, &crep);
  CHECK(crep.cr_residual <= 1e-8);
  CHECK(crep.modulus_defect <= 1e-10);
  auto samples = d.interior_samples(1000, 1e-3, 4);
  for (Point z : samples) {
    Point a = sol.function.gradient(z), b = vb.gradient(z);
    CHECK(std::abs(dot(a, b)) <= 1e-8);
    CHECK(std::abs(std::abs(a) - std::abs(b)) <= 1e-8);
  }
  // complex finite differences of g
  const double h = 1e-6;
  for (std::size_t i = 0; i < 100; ++i) {
    Point z = samples[i];
    Complex fd = (g.g(z + h) - g.g(z - h)) / (2 * h);
    CHECK(std::abs(fd - g.gprime(z)) <= 1e-5 * std::abs(g.gprime(z)));
  }
}

TEST_CASE("path independence and agreement of the two realizations") {
  Domain d = make_graph_domain(dmo_graph(), 0.5);
  auto sol = dmo_unimodal(96);
  const auto& v = sol.function;
  Point start = d.anchor_inward(0.05), target{-0.3, 0.7};
  REQUIRE(d.inside(target));
  std::vector<Point> p1{start, {0.3, 0.3}, {0.2, 0.7}, target};
  std::vector<Point> p2{start, {-0.2, 0.2}, {-0.45, 0.45}, target};
  CHECK(std::abs(conjugate_along(v, p1) - conjugate_along(v, p2)) < 1e-8);

  auto cut = conjugate(v, d);
  auto path = conjugate_by_paths(v, d);
  CHECK(path.path_integrated());
  for (Point z : d.interior_samples(100, 1e-3, 5)) CHECK(std::abs(cut.value(z) - path.value(z)) < 1e-8);
  CHECK(std::abs(path.value(d.anchor())) < 1e-8);
}

TEST_CASE("completion refuses a non-conjugate pair") {
  Domain h = make_halfdisk();
  auto v = HarmonicFunction::named("y");
  auto wrong = HarmonicFunction::named("re_z2");
  CHECK_THROWS_AS(completion(v, wrong, h), Error);
}
