#include <doctest.h>

#include "hodomap/geometry.hpp"

#include <cmath>

using namespace hodomap;

namespace {

// Dense brute-force chord-arc supremum for a curve given by an independent
// arc-length parametrization.
template <class F>
double brute_chord_arc(F&& point, double L, int n) {
  std::vector<Point> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = point(L * i / n);
  double best = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double gap = L * (j - i) / n;
      best = std::max(best, std::min(gap, L - gap) / std::abs(pts[i] - pts[j]));
    }
  return best;
}

Point unit_square_at(double s) {
  s = std::fmod(s, 4.0);
  if (s < 1) return {s, 0};
  if (s < 2) return {1, s - 1};
  if (s < 3) return {3 - s, 1};
  return {0, 4 - s};
}

}  // namespace

TEST_CASE("dmo graph values") {
  const double x = std::exp(-4.0);
  CHECK(dmo_phi(x) == doctest::Approx(x / 2).epsilon(1e-14));
  CHECK(dmo_phi(x) == doctest::Approx(0.0091578194443671).epsilon(1e-12));
  CHECK(dmo_phi(0.0) == 0.0);
  for (double t : {1e-9, 1e-4, 0.01, 0.2, 0.49}) CHECK(dmo_phi(-t) == -dmo_phi(t));
  CHECK_THROWS_AS(dmo_phi(0.5), Error);
  CHECK_THROWS_AS(dmo_phi(-0.7), Error);
  // derivative against central differences
  for (double t : {1e-3, 0.05, 0.3}) {
    double h = 1e-6;
    double fd = (dmo_phi(t + h) - dmo_phi(t - h)) / (2 * h);
    CHECK(dmo_dphi(t) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("chord-arc constant of the unit circle") {
  Domain disk = make_disk();
  double c = chord_arc_constant(disk, 20000);
  CHECK(std::abs(c - kPi / 2) < 1e-3);
  CHECK(c <= kPi / 2 + 1e-12);
}

TEST_CASE("chord-arc constant of the unit square") {
  Domain sq = make_polygon_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, 0, {0.5, 0});
  double oracle = brute_chord_arc(unit_square_at, 4.0, 800);
  CHECK(oracle == doctest::Approx(2.0).epsilon(1e-3));
  double c = chord_arc_constant(sq, 40000);
  CHECK(c <= oracle + 1e-9);
  CHECK(c == doctest::Approx(oracle).epsilon(2e-2));
}

TEST_CASE("chord-arc constant of an ellipse") {
  Domain e = make_ellipse(1.0, 0.5);
  // independent arc-length table by dense polygonal summation
  const int n = 200000;
  std::vector<double> cum(n + 1, 0.0);
  auto at = [](double th) { return Point(std::cos(th), 0.5 * std::sin(th)); };
  for (int i = 0; i < n; ++i) cum[i + 1] = cum[i] + std::abs(at(2 * kPi * (i + 1) / n) - at(2 * kPi * i / n));
  double L = cum.back();
  CHECK(e.boundary().length() == doctest::Approx(L).epsilon(1e-8));
  auto point = [&](double s) {
    auto it = std::lower_bound(cum.begin(), cum.end(), s);
    return at(2 * kPi * static_cast<double>(it - cum.begin()) / n);
  };
  double oracle = brute_chord_arc(point, L, 1000);
  double c = chord_arc_constant(e, 40000);
  CHECK(c == doctest::Approx(oracle).epsilon(1e-2));
  CHECK(c > kPi / 2 + 0.5);
}

TEST_CASE("chord-arc degenerate input") {
  CHECK_THROWS_AS(chord_arc_constant(make_disk(), 1), Error);
}

TEST_CASE("halfdisk boundary geometry") {
  Domain h = make_halfdisk();
  const auto& b = h.boundary();
  CHECK(b.length() == doctest::Approx(2 + kPi).epsilon(1e-12));
  CHECK(b.nodal_length() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(h.anchor()) < 1e-15);
  CHECK(std::abs(b.point_at(h.anchor_s())) < 1e-12);
  CHECK(h.inside({0.1, 0.5}));
  CHECK_FALSE(h.inside({0.1, -0.01}));
  CHECK_FALSE(h.inside({0.9, 0.9}));
  CHECK(validate_domain(h).empty());

  auto samples = boundary_sample(h, 501);
  double total = 0;
  for (const auto& s : samples) {
    total += s.weight;
    // outward normal: a small step along it leaves the domain
    CHECK_FALSE(h.inside(s.point + 1e-6 * s.normal));
    CHECK(h.inside(s.point - 1e-6 * s.normal));
    CHECK(std::abs(std::abs(s.normal) - 1) < 1e-12);
  }
  CHECK(samples.size() == 501);
  CHECK(total == doctest::Approx(b.length()).epsilon(1e-12));
  auto nodal = nodal_boundary_sample(h, 100);
  for (const auto& s : nodal) CHECK(std::abs(s.point.imag()) < 1e-15);
  int corners = 0;
  for (const auto& k : b.knots()) corners += k.is_corner();
  CHECK(corners == 2);
}

TEST_CASE("dmo domain closes and validates") {
  Domain d = make_graph_domain(dmo_graph(), 0.5);
  CHECK(validate_domain(d).empty());
  CHECK(d.smoothness() == Smoothness::C1DMO);
  CHECK(std::abs(d.anchor()) < 1e-15);
  CHECK(d.inside(d.anchor_inward(1e-3)));
  CHECK(d.boundary().nodal_length() > 1.0);
  // free part lies on the circle or on the vertical joins
  for (const auto& s : boundary_sample(d, 400)) {
    if (d.boundary().segment(s.segment).role() == BoundaryRole::Nodal) {
      CHECK(s.point.imag() == doctest::Approx(dmo_phi(s.point.real())).epsilon(1e-10));
    } else {
      bool on_circle = std::abs(std::abs(s.point) - 1) < 1e-12;
      bool on_join = std::abs(std::abs(s.point.real()) - 0.5) < 1e-12;
      CHECK((on_circle || on_join));
    }
  }
}

TEST_CASE("corner domain knots") {
  Domain c = make_graph_domain(corner_graph(), 0.5);
  CHECK(validate_domain(c).empty());
  const Knot* anchor = nullptr;
  for (const auto& k : c.boundary().knots())
    if (std::abs(k.point) < 1e-15) anchor = &k;
  REQUIRE(anchor != nullptr);
  CHECK(anchor->is_corner());
  CHECK(anchor->interior_angle() == doctest::Approx(kPi / 2).epsilon(1e-12));
  Point bis = anchor->inward_bisector();
  CHECK(bis.real() == doctest::Approx(0.0).scale(1));
  CHECK(bis.imag() == doctest::Approx(1.0));
}

TEST_CASE("graph validation errors") {
  GraphParametrization tall{"tall", [](double x) { return 2 + x; }, [](double) { return 1.0; },
                            Smoothness::C1, {}};
  CHECK_THROWS_AS(make_graph_domain(tall, 0.5), Error);
  GraphParametrization bad{"nan", [](double x) { return x > 0.1 ? std::nan("") : 0.0; },
                           [](double) { return 0.0; }, Smoothness::C1, {}};
  CHECK_THROWS_AS(make_graph_domain(bad, 0.5), Error);
  CHECK_THROWS_AS(make_graph_domain(flat_graph(), 1.5), Error);
}

TEST_CASE("clockwise polygon rejected") {
  CHECK_THROWS_AS(make_polygon_domain({{0, 0}, {0, 1}, {1, 1}, {1, 0}}, 0, {0, 0.5}), Error);
}

TEST_CASE("arc-length inversion round trip") {
  Domain d = make_graph_domain(dmo_graph(), 0.5);
  const auto& seg = d.boundary().segment(0);
  for (double frac : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0}) {
    double s = frac * seg.length();
    double t = seg.parameter_at(s);
    // independent partial length by fine trapezoid on the graph
    const int n = 200000;
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += std::abs(seg.at(t * (i + 1) / n) - seg.at(t * i / n));
    CHECK(acc == doctest::Approx(s).epsilon(1e-8));
  }
}

TEST_CASE("interior samples respect margin") {
  Domain h = make_halfdisk();
  auto pts = h.interior_samples(200, 0.05, 3);
  CHECK(pts.size() == 200);
  for (Point p : pts) {
    CHECK(h.inside(p));
    CHECK(h.distance_to_boundary(p) >= 0.05);
  }
  CHECK(pts == h.interior_samples(200, 0.05, 3));
}

TEST_CASE("inside agrees with an unindexed crossing count") {
  // even-odd crossing count over every polyline segment
  auto reference = [](const std::vector<Point>& poly, Point z) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
      Point a = poly[i], b = poly[j];
      if ((a.imag() > z.imag()) != (b.imag() > z.imag()) &&
          z.real() < a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag()))
        in = !in;
    }
    return in;
  };
  for (const Domain& d : {make_halfdisk(), make_graph_domain(dmo_graph(), 0.5),
                          make_polygon_domain({{-0.25, 0}, {0.5, 0}, {0.5, 1}, {-0.5, 1}, {-0.5, 0}}, 2, {0, 0})}) {
    Rect box = d.bounding_box().dilated(0.1);
    QuasiRandom2D q(9);
    int mismatches = 0;
    for (int k = 0; k < 20000; ++k) {
      Point p = q.next();
      Point z{box.x0 + p.real() * box.width(), box.y0 + p.imag() * box.height()};
      // skip points within rounding distance of the polyline
      if (d.distance_to_boundary(z) < 1e-12) continue;
      mismatches += d.inside(z) != reference(d.polyline(), z);
    }
    // heights at band edges and polyline vertex heights
    for (Point v : d.polyline()) {
      Point z{v.real() + 1e-3, v.imag()};
      if (d.distance_to_boundary(z) > 1e-9) mismatches += d.inside(z) != reference(d.polyline(), z);
    }
    CHECK(mismatches == 0);
  }
}
