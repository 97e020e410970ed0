#include <doctest.h>

#include "hodomap/critical.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace hodomap;

namespace {

Holomorphic poly_roots(std::vector<Complex> roots) {
  Holomorphic h;
  h.f = [roots](Complex z) {
    Complex p = 1;
    for (Complex r : roots) p *= z - r;
    return p;
  };
  h.df = [roots](Complex z) {
    Complex sum = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      Complex p = 1;
      for (std::size_t j = 0; j < roots.size(); ++j)
        if (j != i) p *= z - roots[j];
      sum += p;
    }
    return sum;
  };
  return h;
}

/// Distinct roots found by Newton from a 32x32 seed grid, counted inside rect.
int newton_grid_count(const Holomorphic& h, const Rect& box, const Rect& rect, int degree) {
  std::vector<Complex> found;
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      Complex z{box.x0 + (i + 0.5) * box.width() / 32, box.y0 + (j + 0.5) * box.height() / 32};
      for (int it = 0; it < 100; ++it) {
        Complex d = h.df(z);
        if (d == Complex(0)) break;
        z -= h.f(z) / d;
      }
      if (std::abs(h.f(z)) > 1e-10) continue;
      bool dup = false;
      for (Complex r : found) dup = dup || std::abs(r - z) < 1e-6;
      if (!dup) found.push_back(z);
    }
  CHECK(static_cast<int>(found.size()) == degree);
  return static_cast<int>(std::count_if(found.begin(), found.end(), [&](Complex r) { return rect.contains(r); }));
}

Domain square(std::size_t nodal_edges) {
  return make_polygon_domain({{-0.5, 0}, {0.5, 0}, {0.5, 1}, {-0.5, 1}}, nodal_edges, {0, 0});
}

double free_point(const Domain& d, double fraction) {
  double Ln = d.boundary().nodal_length(), L = d.boundary().length();
  return Ln + fraction * (L - Ln);
}

Solution unimodal_solve(const Domain& d, double f0, double f1, double peak, std::size_t n,
                        double offset, double target) {
  SolverConfig cfg;
  cfg.charges = n;
  cfg.offset = offset;
  cfg.target = target;
  return solve_dirichlet(d, unimodal_data(d, free_point(d, f0), free_point(d, f1), free_point(d, peak)),
                         cfg);
}

struct DmoSetup {
  Domain domain = make_graph_domain(dmo_graph(), 0.5);
  Solution v, u;
  std::optional<HodographMap> map;
  Region E;

  explicit DmoSetup(std::size_t charges = 256) {
    v = unimodal_solve(domain, 0.08, 0.93, 0.3, charges, 0.3, 1e-3);
    map.emplace(build_map(completion(v.function, conjugate(v.function, domain), domain), domain,
                          0.5, 0.5, v.report.residual));
    E = localize_E_r(*map);
    // u changes sign along the free arc, so its nodal line reaches the boundary
    SolverConfig cfg;
    cfg.charges = charges;
    cfg.offset = 0.3;
    cfg.target = 1e-3;
    auto fp = [&](double f) { return free_point(domain, f); };
    u = solve_dirichlet(domain,
                        bump_data(domain, {Bump{fp(0.05), fp(0.2), fp(0.35), 1.0},
                                           Bump{fp(0.55), fp(0.7), fp(0.85), -0.7}}),
                        cfg);
  }
};

HodographMap closed_map(const Domain& d, const HarmonicFunction& v, double a, double b) {
  return build_map(completion(v, conjugate(v, d), d), d, a, b, 1e-12);
}

}  // namespace

TEST_CASE("argument principle on polynomials") {
  auto a = poly_roots({1.0, -1.0});  // 3z^2 - 3 up to the factor 3
  Holomorphic h{[](Complex z) { return 3.0 * z * z - 3.0; }, [](Complex z) { return 6.0 * z; }, {}};
  ZeroCount c1 = count_zeros(h, Rect{-2, 2, -2, 2});
  CHECK(c1.conclusive);
  CHECK(c1.count == 2);
  CHECK(count_zeros(a, Rect{-2, 2, -2, 2}).count == 2);

  Holomorphic cube{[](Complex z) { return z * z * z; }, [](Complex z) { return 3.0 * z * z; }, {}};
  ZeroCount c2 = count_zeros(cube, Rect{-1, 1, -1, 1});
  CHECK(c2.conclusive);
  CHECK(c2.count == 3);
  auto loc = locate_zeros(cube, Rect{-1, 1, -1, 1});
  REQUIRE(loc.points.size() == 1);
  CHECK(loc.points[0].multiplicity == 3);
  CHECK(std::abs(loc.points[0].location) <= 1e-6);
}

TEST_CASE("zero on the contour is nudged") {
  Holomorphic h{[](Complex z) { return z - Complex(1, 0); }, [](Complex) { return Complex(1); }, {}};
  ZeroCount c = count_zeros(h, Rect{-1, 1, -1, 1});
  CHECK(c.nudges >= 1);
  CHECK(c.conclusive);
  CHECK(c.count == 1);
}

TEST_CASE("random polynomials against a Newton grid") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1, 1);
  const Rect box{-1.5, 1.5, -1.5, 1.5};
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Complex> roots;
    for (int k = 0; k < 5; ++k) roots.push_back({U(rng), U(rng)});
    auto h = poly_roots(roots);
    for (const Rect& r : {Rect{-1, 1, -1, 1}, Rect{-0.5, 0.5, -0.5, 0.5}, Rect{-0.23, 0.71, -0.61, 0.37}}) {
      ZeroCount zc = count_zeros(h, r);
      REQUIRE(zc.conclusive);
      CHECK(zc.count == newton_grid_count(h, box, r, 5));
      // total equals the polished zeros counted with multiplicity
      auto loc = locate_zeros(h, r);
      CHECK(loc.conclusive);
      int m = 0;
      for (const auto& p : loc.points) {
        m += p.multiplicity;
        CHECK(p.residual <= 1e-12);
      }
      CHECK(m == loc.total);
      CHECK(loc.total == zc.count);
    }
  }
}

TEST_CASE("poles inside the contour are added back") {
  // i/(z - 0.5) + 1 has a pole at 0.5 and a zero at 0.5 - i
  auto h = HarmonicFunction::charge_expansion({Point(0.5, 0)}, {1.0}, 0.0, 0.1);
  Holomorphic f = derivative_of(h);
  Holomorphic g{[f](Complex z) { return f.f(z) + 1.0; }, f.df, f.poles};
  ZeroCount zc = count_zeros(g, Rect{-1, 2, -2, 2});
  CHECK(zc.conclusive);
  CHECK(zc.poles == 1);
  CHECK(zc.count == 1);
}

TEST_CASE("critical points of closed forms") {
  Domain h = make_halfdisk();
  auto y = HarmonicFunction::named("y");
  auto cy = completion(y, conjugate(y, h), h);
  auto none = locate_critical_points(cy, Rect{-1, 1, -1, 1});
  CHECK(none.conclusive);
  CHECK(none.points.empty());

  // Im z^3 on the reflected half-disk: g' = 3z^2
  auto c3 = HarmonicFunction::named("im_z3");
  Holomorphic f = derivative_of(c3);
  auto loc = locate_zeros(f, Rect{-1, 1, -1, 1});
  REQUIRE(loc.points.size() == 1);
  CHECK(loc.points[0].multiplicity == 2);
  CHECK(std::abs(loc.points[0].location) <= 1e-6);
}

TEST_CASE("no interior critical points for unimodal data") {
  SUBCASE("half-disk") {
    Domain d = make_halfdisk();
    auto s = unimodal_solve(d, 0.1, 0.9, 0.5, 128, 0.6, 1e-4);
    auto r = verify_no_interior_critical_points(s.function, d);
    CHECK(r.conclusive);
    CHECK(r.count == 0);
    CHECK(r.winding_distance <= 1e-6);
  }
  SUBCASE("square") {
    Domain d = square(1);
    auto s = unimodal_solve(d, 0.1, 0.9, 0.4, 128, 0.6, 1e-3);
    auto r = verify_no_interior_critical_points(s.function, d);
    CHECK(r.conclusive);
    CHECK(r.count == 0);
  }
  SUBCASE("dmo") {
    DmoSetup dmo;
    auto r = verify_no_interior_critical_points(dmo.v.function, dmo.domain);
    CHECK(r.conclusive);
    CHECK(r.count == 0);
  }
  SUBCASE("closed form y") {
    Domain d = make_halfdisk();
    auto r = verify_no_interior_critical_points(HarmonicFunction::named("y"), d);
    CHECK(r.count == 0);
  }
}

TEST_CASE("bimodal data has a saddle") {
  Domain d = make_halfdisk();
  auto fp = [&](double f) { return free_point(d, f); };
  SolverConfig cfg;
  cfg.charges = 128;
  cfg.target = 1e-4;
  auto s = solve_dirichlet(
      d, bump_data(d, {Bump{fp(0.05), fp(0.2), fp(0.4), 1.0}, Bump{fp(0.6), fp(0.8), fp(0.95), 1.0}}), cfg);
  auto r = verify_no_interior_critical_points(s.function, d);
  CHECK(r.conclusive);
  CHECK(r.count >= 1);
  REQUIRE_FALSE(r.located.empty());
  CHECK(d.inside(r.located[0].location));
  CHECK(std::abs(s.function.gradient(r.located[0].location)) <= 1e-8);
}

TEST_CASE("odd reflection of closed forms") {
  Domain h = make_halfdisk();
  auto map = closed_map(h, HarmonicFunction::named("y"), 0.5, 0.5);
  Region E = localize_E_r(map, std::array<double, 2>{0.5, 0.5});
  QuasiRandom2D q(5);

  auto Uy = reflect_odd(map, HarmonicFunction::named("y"), E, 1e-10);
  auto U3 = reflect_odd(map, HarmonicFunction::named("im_z3"), E, 1e-10);
  for (int k = 0; k < 1000; ++k) {
    Point p = q.next();
    Complex Z{-0.45 + 0.9 * p.real(), -0.45 + 0.9 * p.imag()};
    CHECK(Uy.value(Z) == doctest::Approx(Z.imag()).epsilon(1e-12));
    CHECK(U3.value(Z) == doctest::Approx(std::imag(Z * Z * Z)).epsilon(1e-12));
    CHECK(U3.value(std::conj(Z)) == -U3.value(Z));
    CHECK(std::abs(U3.derivative(Z) - 3.0 * Z * Z) <= 1e-10);
  }
  CHECK_THROWS_WITH_AS(reflect_odd(map, HarmonicFunction::named("re_z2"), E, 1e-6),
                       doctest::Contains("not a Dirichlet-zero trace"), Error);
}

TEST_CASE("reflected DMO field is harmonic across the axis") {
  DmoSetup dmo;
  auto U = reflect_odd(*dmo.map, dmo.u.function, dmo.E, 10 * dmo.u.report.residual);
  // the stencil sees the jump 2|U(X,0)| left by the trace error: at most
  // 6 trace_defect / h^2 on top of the harmonic truncation error
  const double h = 0.05;
  const double jump = 6 * U.trace_defect() / (h * h);
  INFO("trace defect " << U.trace_defect());
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    double X = -(dmo.E.a - h) + 2 * (dmo.E.a - h) * (k + 0.5) / 100;
    double lap = (U.value({X + h, 0}) + U.value({X - h, 0}) + U.value({X, h}) + U.value({X, -h}) -
                  4 * U.value({X, 0})) /
                 (h * h);
    worst = std::max(worst, std::abs(lap));
  }
  CHECK(worst <= 1e-3 + jump);
  for (int k = 0; k < 100; ++k) {
    Complex Z{-0.3 + 0.006 * k, 0.05 + 0.003 * k};
    CHECK(U.value(std::conj(Z)) == -U.value(Z));
  }
}

TEST_CASE("boundary small-gradient measure") {
  SUBCASE("y on the half-disk") {
    auto t = boundary_small_gradient_measure(HarmonicFunction::named("y"), make_halfdisk(), {0.5});
    CHECK(t.measure[0] == 0.0);
    CHECK(t.total_length == doctest::Approx(2.0));
    CHECK_FALSE(t.warning);
  }
  SUBCASE("right-angle corner decays linearly") {
    Domain d = square(2);
    auto s = unimodal_solve(d, 0.1, 0.9, 0.5, 192, 0.6, 1e-3);
    auto t = boundary_small_gradient_measure(s.function, d, {0.005, 0.01, 0.02, 0.04});
    for (std::size_t i = 0; i + 1 < t.measure.size(); ++i) {
      REQUIRE(t.measure[i + 1] > 0);
      double ratio = t.measure[i] / t.measure[i + 1];
      INFO("eps " << t.epsilons[i] << " ratio " << ratio);
      CHECK(ratio >= 0.3);
      CHECK(ratio <= 0.7);
    }
  }
  SUBCASE("dmo") {
    DmoSetup dmo;
    auto t = boundary_small_gradient_measure(dmo.v.function, dmo.domain, {1e-6, 1e-3, 1e-2, 1e-1});
    CHECK(t.measure[1] < 0.01 * t.total_length);
    CHECK_FALSE(t.warning);
    for (std::size_t i = 0; i + 1 < t.measure.size(); ++i) CHECK(t.measure[i] <= t.measure[i + 1]);
  }
}

TEST_CASE("counting ledger") {
  Domain h = make_halfdisk();
  auto y = HarmonicFunction::named("y");
  auto map = closed_map(h, y, 0.5, 0.5);
  Region E = localize_E_r(map, std::array<double, 2>{0.5, 0.5});
  auto table = boundary_small_gradient_measure(y, h, {1e-6});

  SUBCASE("identity") {
    auto U = reflect_odd(map, y, E, 1e-10);
    auto rep = counting_ledger(completion(y, conjugate(y, h), h), map, U, E, table);
    CHECK(rep.conclusive);
    CHECK(rep.u.distinct == 0);
    CHECK(rep.theta.distinct == 0);
    CHECK(rep.U.distinct == 0);
    CHECK(rep.inequality);
  }
  SUBCASE("cubic") {
    auto u = HarmonicFunction::named("im_z3");
    auto U = reflect_odd(map, u, E, 1e-10);
    auto rep = counting_ledger(completion(u, conjugate(u, h), h), map, U, E, table);
    CHECK(rep.conclusive);
    CHECK(rep.u.distinct == 1);
    CHECK(rep.u.with_multiplicity == 2);
    CHECK(rep.u_contour_check == 2);
    CHECK(rep.theta.distinct == 0);
    CHECK(rep.U.distinct == 1);
    CHECK(rep.inequality);
  }
}

TEST_CASE("DMO ledger is finite and stable under charge doubling") {
  auto ledger = [](std::size_t n) {
    DmoSetup dmo(n);
    auto U = reflect_odd(*dmo.map, dmo.u.function, dmo.E, 10 * dmo.u.report.residual);
    auto table = boundary_small_gradient_measure(dmo.v.function, dmo.domain, {1e-6});
    const auto& uf = dmo.u.function;
    return counting_ledger(completion(uf, conjugate(uf, dmo.domain), dmo.domain), *dmo.map, U,
                           dmo.E, table);
  };
  auto r1 = ledger(256);
  CHECK(r1.conclusive);
  CHECK(r1.inequality);
  auto r2 = ledger(512);
  CHECK(r2.conclusive);
  CHECK(r1.u.distinct == r2.u.distinct);
  CHECK(r1.theta.distinct == r2.theta.distinct);
  CHECK(r1.U.distinct == r2.U.distinct);
  REQUIRE(r1.u.points.size() == r2.u.points.size());
  for (std::size_t i = 0; i < r1.u.points.size(); ++i)
    CHECK(std::abs(r1.u.points[i].location - r2.u.points[i].location) <= 1e-4);
}
