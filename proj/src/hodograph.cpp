#include "hodomap/hodograph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hodomap {

namespace {

bool in_local(const Domain& d, Point z) {
  return std::abs(z - d.anchor()) < d.clip_radius() && d.inside(z);
}

bool segments_cross(Point a, Point b, Point c, Point d) {
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool polyline_simple(const std::vector<Point>& p) {
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    for (std::size_t j = i + 2; j + 1 < p.size(); ++j)
      if (segments_cross(p[i], p[i + 1], p[j], p[j + 1])) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// Map

HodographMap::HodographMap(AnalyticCompletion completion, Domain domain, double a, double b,
                           double boundary_tolerance)
    : completion_(std::move(completion)), domain_(std::move(domain)), a_(a), b_(b) {
  diag_.boundary_tolerance = boundary_tolerance;
  const Rect box = domain_.bounding_box();
  constexpr int G = 16;
  for (int j = 0; j < G; ++j)
    for (int i = 0; i < G; ++i) {
      Point z{box.x0 + (i + 0.5) * box.width() / G, box.y0 + (j + 0.5) * box.height() / G};
      if (domain_.inside(z)) seeds_.push_back(z);
    }
  if (domain_.boundary().nodal_length() > 0)
    for (const auto& s : nodal_boundary_sample(domain_, 64)) seeds_.push_back(s.point);
  seed_images_.resize(seeds_.size());
  std::vector<char> ok(seeds_.size(), 1);
  for (std::size_t k = 0; k < seeds_.size(); ++k) {
    try {
      seed_images_[k] = (*this)(seeds_[k]);
    } catch (const Error&) {
      ok[k] = 0;
    }
  }
  std::size_t w = 0;
  for (std::size_t k = 0; k < seeds_.size(); ++k)
    if (ok[k]) seeds_[w] = seeds_[k], seed_images_[w] = seed_images_[k], ++w;
  seeds_.resize(w);
  seed_images_.resize(w);
  if (seeds_.empty()) throw Error("hodograph", "no usable Newton seeds");
}

double HodographMap::det(Point z) const {
  Point gb = completion_.conjugate().gradient(z), gv = completion_.base().gradient(z);
  return gb.real() * gv.imag() - gb.imag() * gv.real();
}

std::optional<Point> HodographMap::newton(Complex Z, Point seed, int max_iter) const {
  Point z = seed;
  const double step_cap = 0.1 * std::abs(Point(domain_.bounding_box().width(),
                                               domain_.bounding_box().height()));
  try {
    for (int it = 0; it < max_iter; ++it) {
      Complex r = (*this)(z) - Z;
      if (std::abs(r) <= 1e-13 * std::max(1.0, std::abs(Z))) return z;
      Complex d = gprime(z);
      if (!(std::abs(d) > 0) || !std::isfinite(std::abs(d))) return std::nullopt;
      Complex step = r / d;
      if (std::abs(step) > step_cap) step *= step_cap / std::abs(step);
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
    }
    if (std::abs((*this)(z) - Z) <= 1e-10) return z;
  } catch (const Error&) {
  }
  return std::nullopt;
}

std::vector<Point> HodographMap::seeds_near(Complex Z, std::size_t k) const {
  std::vector<std::size_t> idx(seeds_.size());
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), [&](std::size_t a, std::size_t b) {
    double da = std::abs(seed_images_[a] - Z), db = std::abs(seed_images_[b] - Z);
    return da < db || (da == db && a < b);
  });
  std::vector<Point> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(seeds_[idx[i]]);
  return out;
}

Point HodographMap::seed_for(Complex Z) const { return seeds_near(Z, 1).front(); }

Point HodographMap::invert(Complex Z, Point seed) const {
  if (!usable()) throw Error("hodograph", "map has failed invariants; inversion blocked");
  std::vector<Point> tries{seed};
  for (Point s : seeds_near(Z, 8)) tries.push_back(s);
  bool left = false;
  Point last = seed;
  for (Point s : tries) {
    auto z = newton(Z, s);
    if (!z) continue;
    if (domain_.inside(*z)) return *z;
    left = true;
    last = *z;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s at (%.6g, %.6g) for Z = (%.6g, %.6g)",
                left ? "left domain" : "inversion failed", last.real(), last.imag(), Z.real(),
                Z.imag());
  throw Error("hodograph", buf);
}

Point HodographMap::invert_closure(Complex Z, Point seed, double tol) const {
  std::vector<Point> tries{seed};
  for (Point s : seeds_near(Z, 8)) tries.push_back(s);
  for (Point s : tries) {
    auto z = newton(Z, s);
    if (z && (domain_.inside(*z) || domain_.distance_to_boundary(*z) <= tol)) return *z;
  }
  throw Error("hodograph", "inversion failed near the boundary");
}

HodographMap build_map(const AnalyticCompletion& completion, const Domain& domain, double a,
                       double b, double boundary_tolerance) {
  if (!(a > 0 && b > 0)) throw Error("hodograph", "image rectangle needs a, b > 0");
  HodographMap map(completion, domain, a, b, boundary_tolerance);
  auto& diag = const_cast<MapDiagnostics&>(map.diagnostics());
  Complex at_anchor = map(domain.anchor());
  diag.anchor_offset = std::abs(at_anchor);
  // vbar is normalized at the anchor exactly; v only up to the trace accuracy
  if (std::abs(at_anchor.real()) > 1e-4 ||
      std::abs(at_anchor.imag()) > std::max(1e-4, boundary_tolerance))
    throw Error("hodograph", "Theta(anchor) is not the origin; anchor normalization is off");
  // the Y component only vanishes to the accuracy of the boundary trace
  if (std::abs(at_anchor.real()) > 1e-6 ||
      std::abs(at_anchor.imag()) > std::max(1e-6, boundary_tolerance))
    diag.failures.push_back("Theta(anchor) off the origin");

  auto samples = domain.interior_samples(1000, 1e-3, 23);
  for (Point z : samples) {
    double g2 = std::norm(completion.base().gradient(z));
    if (g2 > 0) diag.det_defect = std::max(diag.det_defect, std::abs(std::abs(map.det(z)) - g2) / g2);
  }
  if (diag.det_defect > 1e-10) diag.failures.push_back("det DTheta differs from |grad v|^2");

  if (domain.boundary().nodal_length() > 0)
    for (const auto& s : nodal_boundary_sample(domain, 512))
      diag.boundary_image = std::max(diag.boundary_image, std::abs(map(s.point).imag()));
  if (diag.boundary_image > boundary_tolerance + 1e-12)
    diag.failures.push_back("nodal boundary not mapped to {Y = 0}");
  return map;
}

// ---------------------------------------------------------------------------
// Level curves

namespace {

struct Crossing {
  Point point;
  double s;
};

/// Points of the boundary of Omega cap B_1 where v = level.
std::vector<Crossing> level_crossings(const HarmonicFunction& v, const Domain& domain,
                                      double level) {
  const auto& bc = domain.boundary();
  const double R = domain.clip_radius();
  const Point o = domain.anchor();
  std::vector<Crossing> out;
  constexpr int N = 4096;
  auto fs = [&](double s) { return v.value(bc.point_at(s)) - level; };
  double s_prev = 0, f_prev = fs(0);
  // boundary points on the clip circle itself count as inside
  const double R_in = R * (1 + 1e-12);
  bool in_prev = std::abs(bc.point_at(0) - o) <= R_in;
  for (int i = 1; i <= N; ++i) {
    double s = bc.length() * i / N;
    if (i == N) s = bc.length() * (1 - 1e-15);
    double f = fs(s);
    bool in = std::abs(bc.point_at(s) - o) <= R_in;
    if (in && in_prev && ((f_prev < 0) != (f < 0))) {
      double lo = s_prev, hi = s, flo = f_prev;
      for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi), fm = fs(mid);
        if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
        else hi = mid;
      }
      double sm = 0.5 * (lo + hi);
      out.push_back({bc.point_at(sm), sm});
    }
    s_prev = s, f_prev = f, in_prev = in;
  }
  // clip circle, where the domain reaches beyond it
  constexpr int C = 2048;
  auto fc = [&](double t) { return v.value(o + std::polar(R, t)) - level; };
  for (int i = 0; i < C; ++i) {
    double t0 = 2 * kPi * i / C, t1 = 2 * kPi * (i + 1) / C;
    if (!domain.inside(o + std::polar(R, t0)) || !domain.inside(o + std::polar(R, t1))) continue;
    double f0 = fc(t0), f1 = fc(t1);
    if ((f0 < 0) == (f1 < 0)) continue;
    for (int it = 0; it < 100 && t1 - t0 > 1e-15; ++it) {
      double mid = 0.5 * (t0 + t1), fm = fc(mid);
      if ((fm < 0) == (f0 < 0)) t0 = mid, f0 = fm;
      else t1 = mid;
    }
    out.push_back({o + std::polar(R, 0.5 * (t0 + t1)), -1});
  }
  return out;
}

Point level_tangent(const HarmonicFunction& v, Point z) {
  Point g = v.gradient(z);
  double m = std::abs(g);
  if (m < 1e-10) throw Error("hodograph", "critical point on level curve");
  return cross_j(g) / m;
}

std::optional<Point> project(const HarmonicFunction& v, Point q, double level) {
  for (int it = 0; it < 30; ++it) {
    double r = v.value(q) - level;
    if (std::abs(r) <= 1e-13 * std::max(1.0, std::abs(level))) return q;
    Point g = v.gradient(q);
    double n2 = std::norm(g);
    if (n2 < 1e-20) throw Error("hodograph", "critical point on level curve");
    q -= r * g / n2;
  }
  if (std::abs(v.value(q) - level) <= 1e-10) return q;
  return std::nullopt;
}

}  // namespace

LevelCurve trace_level_curve(const HarmonicFunction& v, const Domain& domain, double level) {
  LevelCurve curve;
  curve.level = level;
  auto crossings = level_crossings(v, domain, level);
  curve.boundary_crossings = crossings.size();
  if (crossings.empty()) return curve;

  // start where the forward direction points into the domain
  const Crossing* start = nullptr;
  // boundary crossings decide by the outward normal: the polyline behind
  // inside() cuts off curved arcs by up to a sagitta
  for (const auto& c : crossings) {
    Point t = level_tangent(v, c.point);
    bool inward = c.s >= 0 ? dot(t, domain.boundary().normal_at(c.s)) < 0
                           : in_local(domain, c.point + 1e-6 * t);
    if (inward) {
      start = &c;
      break;
    }
  }
  if (!start) return curve;

  Point z = start->point;
  curve.nodes.push_back(z);
  double h = 1e-3;
  constexpr double kMaxStep = 1e-2, kMaxTurn = 0.1;
  constexpr std::size_t kMaxNodes = 200000;
  while (curve.nodes.size() < kMaxNodes) {
    Point t = level_tangent(v, z);
    auto q = project(v, z + h * t, level);
    bool ok = q && std::abs(*q - z) < 2 * h;
    if (ok) {
      Point tq = level_tangent(v, *q);
      ok = std::abs(std::arg(tq / t)) <= kMaxTurn;
    }
    if (!ok) {
      h *= 0.5;
      if (h < 1e-12) throw Error("hodograph", "level curve tracing stalled");
      continue;
    }
    if (!in_local(domain, *q)) {
      // exit: snap to the nearest scanned boundary crossing, otherwise bisect
      Point end = *q;
      double best = 1e300;
      for (const auto& c : crossings)
        if (&c != start && std::abs(c.point - *q) < best) best = std::abs(c.point - *q), end = c.point;
      if (best > 2 * h + 1e-6) {
        double lo = 0, hi = h;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          auto p = project(v, z + mid * t, level);
          if (p && in_local(domain, *p)) lo = mid;
          else hi = mid;
        }
        end = project(v, z + lo * t, level).value_or(z);
      }
      curve.nodes.push_back(end);
      break;
    }
    curve.nodes.push_back(*q);
    z = *q;
    h = std::min(kMaxStep, 1.5 * h);
  }
  if (curve.nodes.size() >= kMaxNodes) throw Error("hodograph", "level curve does not terminate");
  curve.endpoints = {curve.nodes.front(), curve.nodes.back()};
  for (Point p : curve.nodes)
    curve.max_level_defect = std::max(curve.max_level_defect, std::abs(v.value(p) - level));
  curve.simple = polyline_simple(curve.nodes);
  return curve;
}

// ---------------------------------------------------------------------------
// Injectivity

InjectivityReport verify_injectivity(const HodographMap& map, const std::vector<double>& levels,
                                     std::size_t n_probe, unsigned long long seed) {
  InjectivityReport rep;
  rep.pass = true;
  const auto& v = map.completion().base();
  for (double level : levels) {
    LevelMonotonicity m;
    m.level = level;
    LevelCurve c = trace_level_curve(v, map.domain(), level);
    m.nodes = c.nodes.size();
    m.empty = c.empty();
    m.monotone = true;
    m.min_increment = c.empty() ? 0 : 1e300;
    for (std::size_t i = 1; i < c.nodes.size(); ++i) {
      double inc = map(c.nodes[i]).real() - map(c.nodes[i - 1]).real();
      if (inc < m.min_increment) m.min_increment = inc;
      if (!(inc > 0)) {
        m.monotone = false;
        if (!rep.witness) rep.witness = std::array<Point, 2>{c.nodes[i - 1], c.nodes[i]};
      }
    }
    if (!m.monotone) rep.pass = false;
    rep.levels.push_back(m);
    rep.curves.push_back(std::move(c));
  }

  // probes: quasi-random pairs, plus a Newton search for a second preimage of
  // the first kNewtonProbes probe images started from seeds away from the probe
  constexpr std::size_t kNewtonProbes = 1000;
  auto pts = map.domain().interior_samples(2 * n_probe, 0.0, seed + 101);
  rep.probes = n_probe;
  std::vector<std::optional<std::array<Point, 2>>> hit(n_probe);
  parallel_for(n_probe, [&](std::size_t k) {
    Point z1 = pts[2 * k], z2 = pts[2 * k + 1];
    Complex Z1 = map(z1);
    if (std::abs(z1 - z2) > 1e-3 && std::abs(Z1 - map(z2)) < 1e-9) {
      hit[k] = std::array<Point, 2>{z1, z2};
      return;
    }
    if (k >= kNewtonProbes) return;
    for (Point s : map.seeds_near(Z1, 12)) {
      if (std::abs(s - z1) < 0.05) continue;
      auto w = map.newton(Z1, s, 15);
      if (w && map.domain().inside(*w) && std::abs(*w - z1) > 1e-3 &&
          std::abs(map(*w) - Z1) < 1e-9) {
        hit[k] = std::array<Point, 2>{z1, *w};
        return;
      }
    }
  });
  for (const auto& h : hit)
    if (h) {
      ++rep.collisions;
      if (!rep.witness) rep.witness = *h;
    }
  if (rep.collisions) rep.pass = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Region

std::vector<Point> Region::polygon() const {
  std::vector<Point> out;
  for (const auto& side : sides)
    for (std::size_t i = out.empty() ? 0 : 1; i < side.size(); ++i) out.push_back(side[i]);
  if (out.size() > 1 && std::abs(out.front() - out.back()) < 1e-9) out.pop_back();
  return out;
}

bool Region::contains(Point z) const {
  bool in = false;
  auto p = polygon();
  for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
    Point a = p[i], b = p[j];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (z.real() < x) in = !in;
    }
  }
  return in;
}

Rect Region::bounding_box() const {
  Rect r{1e300, -1e300, 1e300, -1e300};
  for (const auto& side : sides)
    for (Point z : side) {
      r.x0 = std::min(r.x0, z.real());
      r.x1 = std::max(r.x1, z.real());
      r.y0 = std::min(r.y0, z.imag());
      r.y1 = std::max(r.y1, z.imag());
    }
  return r;
}

namespace {

/// Continuation of Theta^{-1} along the straight image segment Zs -> Ze.
bool follow_side(const HodographMap& map, Point z, Complex Zs, Complex Ze, std::vector<Point>& out) {
  out.assign(1, z);
  const double len = std::abs(Ze - Zs);
  if (len == 0) return true;
  const double dt_max = std::min(1.0, 5e-3 / len);
  double tau = 0, dt = 0.25 * dt_max;
  Complex Zc = Zs;
  while (tau < 1) {
    double tn = std::min(1.0, tau + dt);
    Complex Zt = Zs + (Ze - Zs) * tn;
    Point next = z;
    bool found = false;
    Complex gp = map.gprime(z);
    if (std::abs(gp) > 1e-14) {
      auto q = map.newton(Zt, z + (Zt - Zc) / gp, 12);
      if (q && std::abs(*q - z) <= 2e-2) next = *q, found = true;
    }
    if (!found) {
      if (dt > 1e-7) {
        dt *= 0.5;
        continue;
      }
      // passing a zero of g': the rectangle interior stays on the left, so
      // take the nearby preimage that turns furthest left
      Point dir = out.size() > 1 ? z - out[out.size() - 2] : Point(0, 0);
      double best = -1e300;
      std::vector<Point> starts = map.seeds_near(Zt, 16);
      for (double rad : {1e-3, 4e-3, 1.6e-2})
        for (int k = 0; k < 16; ++k) starts.push_back(z + std::polar(rad, 2 * kPi * k / 16));
      for (Point s : starts) {
        auto w = map.newton(Zt, s);
        if (!w || std::abs(*w - z) > 0.05 || std::abs(*w - z) < 1e-15) continue;
        double score = std::abs(dir) > 0 ? cross(dir / std::abs(dir), (*w - z) / std::abs(*w - z))
                                         : -std::abs(*w - z);
        if (score > best + 1e-12) best = score, next = *w, found = true;
      }
      if (!found) return false;
    }
    z = next;
    Zc = Zt;
    tau = tn;
    out.push_back(z);
    dt = std::min(dt_max, 1.5 * dt);
  }
  return true;
}

}  // namespace

std::optional<std::vector<Point>> trace_rectangle_preimage(const HodographMap& map,
                                                           const Rect& image, double closure_tol) {
  auto C = image.corners();
  Point z0;
  try {
    z0 = map.invert_closure(C[0], map.seed_for(C[0]), closure_tol);
  } catch (const Error&) {
    return std::nullopt;
  }
  std::vector<Point> poly, side;
  Point z = z0;
  for (int k = 0; k < 4; ++k) {
    if (!follow_side(map, z, C[k], C[(k + 1) % 4], side)) return std::nullopt;
    poly.insert(poly.end(), side.begin(), side.end() - 1);
    z = side.back();
  }
  return poly;
}

std::optional<Region> trace_region(const HodographMap& map, double a, double b,
                                   int* failed_side) {
  if (failed_side) *failed_side = -1;
  Region r;
  r.a = a;
  r.b = b;
  const std::array<Complex, 4> C{Complex(-a, 0), Complex(a, 0), Complex(a, b), Complex(-a, b)};
  Point z0;
  try {
    z0 = map.invert_closure(C[0], map.seed_for(C[0]), 1e-6);
  } catch (const Error&) {
    if (failed_side) *failed_side = 0;
    return std::nullopt;
  }
  Point z = z0;
  for (int k = 0; k < 4; ++k) {
    if (!follow_side(map, z, C[k], C[(k + 1) % 4], r.sides[k])) {
      if (failed_side) *failed_side = k;
      return std::nullopt;
    }
    z = r.sides[k].back();
  }
  r.closure_gap = std::abs(z - z0);
  r.sides[3].back() = z0;

  const Domain& d = map.domain();
  // bottom nodes sit on the nodal boundary up to the trace accuracy
  double slack = std::max(1e-6, 10 * map.diagnostics().boundary_tolerance);
  r.outer_inclusion = true;
  for (int k = 0; k < 4 && r.outer_inclusion; ++k)
    for (Point p : r.sides[k]) {
      bool ok = std::abs(p - d.anchor()) <= d.clip_radius() + 1e-9 &&
                (d.inside(p) || d.distance_to_boundary(p) <= (k == 0 ? slack : 1e-6));
      if (!ok) {
        r.outer_inclusion = false;
        if (failed_side) *failed_side = k;
        break;
      }
    }
  return r;
}

std::vector<Point> ball_samples(const Domain& domain, double radius, std::size_t n,
                                unsigned long long seed) {
  std::vector<Point> out;
  QuasiRandom2D qr(seed + 7);
  const Point o = domain.anchor();
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 1000 * n + 10000) throw Error("hodograph", "Omega cap B_r is too thin to sample");
    Point u = qr.next();
    Point z = o + radius * Point(2 * u.real() - 1, 2 * u.imag() - 1);
    if (std::abs(z - o) < radius && domain.inside(z)) out.push_back(z);
  }
  return out;
}

namespace {

double coverage(const Region& r, const std::vector<Point>& pts) {
  std::vector<char> in(pts.size());
  parallel_for(pts.size(), [&](std::size_t k) { in[k] = r.contains(pts[k]); });
  return static_cast<double>(std::count(in.begin(), in.end(), 1)) / static_cast<double>(pts.size());
}

}  // namespace

Region localize_E_r(const HodographMap& map, std::optional<std::array<double, 2>> ab,
                    unsigned long long seed) {
  auto inner = ball_samples(map.domain(), 0.5, 10000, seed);
  std::optional<Region> region;
  if (ab) {
    region = trace_region(map, (*ab)[0], (*ab)[1]);
    if (!region) throw Error("hodograph", "could not trace the preimage of the given rectangle");
    region->inner_coverage = coverage(*region, inner);
  } else {
    // start from the image of the sampled half ball, shrink the side that
    // breaks the outer inclusion, then grow each side while it still holds
    double a = 0, b = 0;
    for (Point z : inner) {
      Complex Z = map(z);
      a = std::max(a, std::abs(Z.real()));
      b = std::max(b, Z.imag());
    }
    a *= 1.05;
    b *= 1.05;
    int steps = 0;
    for (; steps <= 60; ++steps) {
      int side = -1;
      region = trace_region(map, a, b, &side);
      if (region && region->outer_inclusion) break;
      if (side == 2) b *= 0.9;
      else a *= 0.9;
    }
    if (!region || !region->outer_inclusion)
      throw Error("hodograph", "no image rectangle keeps E inside Omega cap B_1");
    region->inner_coverage = coverage(*region, inner);
    for (int which = 0; which < 2 && region->inner_coverage < 1; ++which)
      for (int grow = 0; grow < 20 && region->inner_coverage < 1; ++grow) {
        double na = which == 0 ? region->a * 1.03 : region->a;
        double nb = which == 1 ? region->b * 1.03 : region->b;
        auto bigger = trace_region(map, na, nb);
        if (!bigger || !bigger->outer_inclusion) break;
        bigger->inner_coverage = coverage(*bigger, inner);
        region = bigger;
      }
    region->shrink_steps = steps;
    region->automatic = true;
  }
  region->inner_inclusion = region->inner_coverage == 1.0;
  return *region;
}

double transformation_law_defect(const HodographMap& map, const HarmonicFunction& u,
                                 const std::vector<Point>& points) {
  const auto& vb = map.completion().conjugate();
  const auto& v = map.completion().base();
  double worst = 0;
  for (Point z : points) {
    Point w = map.invert(map(z), z);
    // grad u = DTheta^T grad U, rows of DTheta are grad vbar and grad v
    Point p = vb.gradient(w), q = v.gradient(w), gu = u.gradient(w);
    double det = p.real() * q.imag() - p.imag() * q.real();
    double Ux = (q.imag() * gu.real() - q.real() * gu.imag()) / det;
    double Uy = (-p.imag() * gu.real() + p.real() * gu.imag()) / det;
    double lhs = std::norm(u.gradient(z));
    double rhs = std::abs(map.det(z)) * (Ux * Ux + Uy * Uy);
    double scale = std::max(lhs, 1e-300);
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

}  // namespace hodomap
