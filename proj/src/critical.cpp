#include "hodomap/critical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hodomap {

Holomorphic derivative_of(const HarmonicFunction& h) {
  Holomorphic out;
  out.f = [h](Complex z) { return h.derivative(z); };
  out.df = [h](Complex z) { return h.second_derivative(z); };
  for (const auto& c : h.charges())
    if (c.coeff != Complex(0)) out.poles.push_back(c.at);
  return out;
}

Holomorphic derivative_of(const AnalyticCompletion& c) { return derivative_of(c.base()); }

std::vector<ContourPiece> polygon_contour(const std::vector<Point>& closed) {
  std::vector<ContourPiece> out;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    Point a = closed[i], b = closed[(i + 1) % closed.size()];
    if (a == b) continue;
    out.push_back({[a, b](double t) { return a + t * (b - a); }, [a, b](double) { return b - a; }});
  }
  return out;
}

std::vector<ContourPiece> rect_contour(const Rect& r) { return polygon_contour(r.corners()); }

namespace {

bool polygon_inside(const std::vector<Point>& p, Point z) {
  bool in = false;
  for (std::size_t i = 0, j = p.size() - 1; i < p.size(); j = i++) {
    Point a = p[i], b = p[j];
    if ((a.imag() > z.imag()) != (b.imag() > z.imag())) {
      double x = a.real() + (z.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (z.real() < x) in = !in;
    }
  }
  return in;
}

double polygon_distance(const std::vector<Point>& p, Point z) {
  double best = 1e300;
  for (std::size_t i = 0; i < p.size(); ++i) {
    Point a = p[i], ab = p[(i + 1) % p.size()] - a;
    double t = std::norm(ab) > 0 ? std::clamp(dot(z - a, ab) / std::norm(ab), 0.0, 1.0) : 0.0;
    best = std::min(best, std::abs(z - (a + t * ab)));
  }
  return best;
}

struct PanelSum {
  Complex value = 0;
  double min_modulus = 1e300;
  bool converged = true;
};

/// GL16 of f'/f * velocity over [t0, t1] of one piece.
Complex panel_rule(const Holomorphic& h, const ContourPiece& c, double t0, double t1,
                   double& min_modulus) {
  const auto& x = GaussLegendre16::nodes();
  const auto& w = GaussLegendre16::weights();
  const double half = 0.5 * (t1 - t0), mid = 0.5 * (t0 + t1);
  Complex sum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double t = mid + half * x[i];
    Point z = c.at(t);
    Complex f = h.f(z);
    min_modulus = std::min(min_modulus, std::abs(f));
    sum += w[i] * h.df(z) / f * c.velocity(t);
  }
  return half * sum;
}

void adaptive(const Holomorphic& h, const ContourPiece& c, double t0, double t1, Complex whole,
              int depth, PanelSum& acc) {
  double tm = 0.5 * (t0 + t1);
  Complex left = panel_rule(h, c, t0, tm, acc.min_modulus);
  Complex right = panel_rule(h, c, tm, t1, acc.min_modulus);
  Complex both = left + right;
  if (std::abs(both - whole) <= 1e-10 + 1e-9 * std::abs(both)) {
    acc.value += both;
    return;
  }
  if (depth >= 12) {
    acc.value += both;
    acc.converged = false;
    return;
  }
  adaptive(h, c, t0, tm, left, depth + 1, acc);
  adaptive(h, c, tm, t1, right, depth + 1, acc);
}

ZeroCount finish(const Holomorphic& h, Complex integral, double min_modulus, bool converged,
                 const std::vector<Point>& polygon) {
  ZeroCount zc;
  zc.winding = integral / Complex(0, 2 * kPi);
  zc.min_modulus = min_modulus;
  double r = std::round(zc.winding.real());
  for (Point p : h.poles)
    if (!polygon.empty() && polygon_inside(polygon, p)) ++zc.poles;
  zc.count = static_cast<int>(r) + zc.poles;
  zc.conclusive = std::isfinite(r) && std::abs(zc.winding.real() - r) <= 0.05 &&
                  std::abs(zc.winding.imag()) <= 0.05 && min_modulus > 1e-12;
  if (!converged) zc.note = "panel refinement hit the depth limit";
  if (!zc.conclusive && zc.note.empty()) zc.note = "winding number not near an integer";
  return zc;
}

}  // namespace

ZeroCount count_zeros_on_contour(const Holomorphic& h, const std::vector<ContourPiece>& pieces,
                                 const std::vector<Point>& polygon_for_poles) {
  PanelSum acc;
  for (const auto& c : pieces) {
    constexpr int kStart = 8;
    for (int k = 0; k < kStart; ++k) {
      double t0 = static_cast<double>(k) / kStart, t1 = static_cast<double>(k + 1) / kStart;
      Complex whole = panel_rule(h, c, t0, t1, acc.min_modulus);
      adaptive(h, c, t0, t1, whole, 0, acc);
    }
  }
  return finish(h, acc.value, acc.min_modulus, acc.converged, polygon_for_poles);
}

ZeroCount count_zeros(const Holomorphic& h, const Rect& rect) {
  ZeroCount zc;
  for (int nudge = 0; nudge <= 3; ++nudge) {
    Rect r = rect.dilated(1e-6 * nudge);
    try {
      zc = count_zeros_on_contour(h, rect_contour(r), r.corners());
    } catch (const Error& e) {
      zc = ZeroCount{};
      zc.note = e.what();
      zc.min_modulus = 0;
    }
    zc.nudges = nudge;
    // a zero between quadrature nodes leaves |f| large but spoils the winding
    if (zc.conclusive) break;
  }
  return zc;
}

// ---------------------------------------------------------------------------
// Subdivision

namespace {

constexpr double kSplit = 0.4813;  // asymmetric, so symmetric zeros avoid cell edges

std::array<Rect, 4> split(const Rect& r) {
  double xm = r.x0 + kSplit * r.width(), ym = r.y0 + kSplit * r.height();
  return {Rect{r.x0, xm, r.y0, ym}, Rect{xm, r.x1, r.y0, ym}, Rect{r.x0, xm, ym, r.y1},
          Rect{xm, r.x1, ym, r.y1}};
}

/// Multiplicity-aware Newton from `z`; nullopt if it leaves `cell`.
std::optional<Point> polish(const Holomorphic& h, Point z, int m, const Rect& cell) {
  const Rect box = cell.dilated(1e-9 + 1e-6 * std::max(cell.width(), cell.height()));
  try {
    for (int it = 0; it < 80; ++it) {
      Complex f = h.f(z), df = h.df(z);
      if (f == Complex(0)) return z;
      if (df == Complex(0)) return std::nullopt;
      Complex step = static_cast<double>(m) * f / df;
      z -= step;
      if (!box.contains(z)) return std::nullopt;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
  } catch (const Error&) {
    return std::nullopt;
  }
  return z;
}

struct Locator {
  const Holomorphic& h;
  const std::function<bool(const Rect&)>& keep;
  double min_size;
  LocateResult result;

  void add(Point z, int m) {
    double res = 0;
    try {
      res = std::abs(h.f(z));
    } catch (const Error&) {
      res = INFINITY;
    }
    result.points.push_back({z, m, res});
  }

  void visit(const Rect& cell, int count) {
    if (count == 0) return;
    double size = std::max(cell.width(), cell.height());
    if (count == 1) {
      if (auto z = polish(h, cell.center(), 1, cell)) {
        add(*z, 1);
        return;
      }
    } else {
      // one zero of multiplicity `count`? confirm on a small box around it
      if (auto z = polish(h, cell.center(), count, cell)) {
        double s = std::max(1e-7, 1e-4 * size);
        ZeroCount near = count_zeros(h, Rect{z->real() - s, z->real() + s, z->imag() - s, z->imag() + s});
        if (near.conclusive && near.count == count) {
          add(*z, count);
          return;
        }
      }
    }
    if (size < min_size) {
      add(cell.center(), count);
      return;
    }
    for (const Rect& sub : split(cell)) {
      if (keep && !keep(sub)) continue;
      ZeroCount zc = count_zeros(h, sub);
      if (!zc.conclusive) {
        result.conclusive = false;
        result.inconclusive_cells.push_back(sub);
        continue;
      }
      visit(sub, zc.count);
    }
  }
};

}  // namespace

LocateResult locate_zeros(const Holomorphic& h, const Rect& rect,
                          const std::function<bool(const Rect&)>& keep) {
  Locator loc{h, keep, 1e-7 * std::max(1.0, std::max(rect.width(), rect.height())), {}};
  ZeroCount root = count_zeros(h, rect);
  loc.result.total = root.count;
  if (!root.conclusive) {
    loc.result.conclusive = false;
    loc.result.inconclusive_cells.push_back(rect);
    return loc.result;
  }
  if (keep && !keep(rect)) return loc.result;
  loc.visit(rect, root.count);
  auto& pts = loc.result.points;
  std::sort(pts.begin(), pts.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return a.location.real() < b.location.real() ||
           (a.location.real() == b.location.real() && a.location.imag() < b.location.imag());
  });
  return loc.result;
}

LocateResult locate_critical_points(const AnalyticCompletion& c, const Rect& rect) {
  return locate_zeros(derivative_of(c), rect);
}

// ---------------------------------------------------------------------------
// Interior count on the domain boundary

namespace {

ContourPiece segment_piece(const Segment& seg, double t0, double t1) {
  return {[&seg, t0, t1](double t) { return seg.at(t0 + (t1 - t0) * t); },
          [&seg, t0, t1](double t) { return seg.velocity(t0 + (t1 - t0) * t) * (t1 - t0); }};
}

ContourPiece line_piece(Point a, Point b) {
  return {[a, b](double t) { return a + t * (b - a); }, [a, b](double) { return b - a; }};
}

/// Boundary contour with circular detours of radius r around corner knots.
std::vector<ContourPiece> detoured_boundary(const Domain& domain, double r,
                                            std::vector<Point>& polygon) {
  const auto& bc = domain.boundary();
  const auto& knots = bc.knots();  // knot i starts segment i
  const std::size_t n = bc.size();
  std::vector<ContourPiece> pieces;
  auto corner_at_start = [&](std::size_t seg) { return knots[seg].is_corner(); };
  for (std::size_t i = 0; i < n; ++i) {
    const Segment& seg = bc.segment(i);
    double L = seg.length();
    bool c0 = corner_at_start(i), c1 = corner_at_start((i + 1) % n);
    double t0 = c0 ? seg.parameter_at(std::min(r, 0.25 * L)) : 0.0;
    double t1 = c1 ? seg.parameter_at(L - std::min(r, 0.25 * L)) : 1.0;
    pieces.push_back(segment_piece(seg, t0, t1));
    if (c1) {
      const Knot& k = knots[(i + 1) % n];
      const Segment& next = bc.segment((i + 1) % n);
      double tn = next.parameter_at(std::min(r, 0.25 * next.length()));
      Point a = seg.at(t1), b = next.at(tn);
      double th0 = std::arg(-k.tangent_in), alpha = k.interior_angle();
      Point p0 = k.point + std::polar(r, th0), p1 = k.point + std::polar(r, th0 - alpha);
      pieces.push_back(line_piece(a, p0));
      Point c = k.point;
      pieces.push_back({[c, r, th0, alpha](double t) { return c + std::polar(r, th0 - alpha * t); },
                        [r, th0, alpha](double t) {
                          return Complex(0, -alpha) * std::polar(r, th0 - alpha * t);
                        }});
      pieces.push_back(line_piece(p1, b));
    }
  }
  polygon.clear();
  for (const auto& p : pieces)
    for (int k = 0; k < 16; ++k) polygon.push_back(p.at(k / 16.0));
  return pieces;
}

}  // namespace

InteriorCriticalReport verify_no_interior_critical_points(const HarmonicFunction& h,
                                                          const Domain& domain,
                                                          double corner_margin) {
  InteriorCriticalReport rep;
  Holomorphic f = derivative_of(h);
  std::vector<Point> polygon;
  auto pieces = detoured_boundary(domain, corner_margin, polygon);
  ZeroCount zc = count_zeros_on_contour(f, pieces, polygon);
  rep.count = zc.count;
  rep.conclusive = zc.conclusive;
  rep.winding_distance = std::abs(zc.winding.real() - std::round(zc.winding.real()));

  // witnesses: local minima of |grad h| on an interior grid, then Newton
  constexpr int G = 64;
  const Rect box = domain.bounding_box();
  std::vector<double> mod(G * G, INFINITY);
  std::vector<Point> node(G * G);
  parallel_for(G, [&](std::size_t j) {
    for (int i = 0; i < G; ++i) {
      Point z{box.x0 + (i + 0.5) * box.width() / G, box.y0 + (j + 0.5) * box.height() / G};
      node[j * G + i] = z;
      if (domain.inside(z) && domain.distance_to_boundary(z) > corner_margin)
        mod[j * G + i] = std::abs(f.f(z));
    }
  });
  std::vector<int> minima;
  for (int j = 1; j + 1 < G; ++j)
    for (int i = 1; i + 1 < G; ++i) {
      double m = mod[j * G + i];
      if (!std::isfinite(m)) continue;
      bool is_min = true;
      for (int dj = -1; dj <= 1 && is_min; ++dj)
        for (int di = -1; di <= 1; ++di)
          if ((di || dj) && mod[(j + dj) * G + i + di] < m) is_min = false;
      if (is_min) minima.push_back(j * G + i);
    }
  std::sort(minima.begin(), minima.end(), [&](int a, int b) { return mod[a] < mod[b]; });
  if (minima.size() > 8) minima.resize(8);
  for (int k : minima) {
    auto z = polish(f, node[k], 1, box);
    if (!z || !domain.inside(*z) || std::abs(f.f(*z)) > 1e-8) continue;
    bool dup = false;
    for (const auto& p : rep.located) dup = dup || std::abs(p.location - *z) < 1e-6;
    if (!dup) rep.located.push_back({*z, 1, std::abs(f.f(*z))});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Reflection

ReflectedField::ReflectedField(const HodographMap& map, HarmonicFunction u, const Region& region,
                               double tolerance)
    : map_(&map), u_(std::move(u)), region_(region), tolerance_(tolerance) {
  constexpr int K = 201;
  for (int k = 0; k < K; ++k) {
    double X = -region_.a + 2 * region_.a * (k + 0.5) / K;
    trace_defect_ = std::max(trace_defect_, std::abs(u_.value(preimage({X, 0.0}))));
  }
}

Point ReflectedField::preimage(Complex Z) const {
  return map_->invert_closure(Z, map_->seed_for(Z), 1e-4);
}

double ReflectedField::value(Complex Z) const {
  if (Z.imag() >= 0) return u_.value(preimage(Z));
  return -u_.value(preimage(std::conj(Z)));
}

Complex ReflectedField::derivative(Complex Z) const {
  if (Z.imag() < 0) return std::conj(derivative(std::conj(Z)));
  Point w = preimage(Z);
  return u_.derivative(w) / map_->gprime(w);
}

Complex ReflectedField::second_derivative(Complex Z) const {
  if (Z.imag() < 0) return std::conj(second_derivative(std::conj(Z)));
  Point w = preimage(Z);
  Complex gp = map_->gprime(w), gs = map_->gsecond(w);
  return (u_.second_derivative(w) * gp - u_.derivative(w) * gs) / (gp * gp * gp);
}

Point ReflectedField::gradient(Complex Z) const {
  Complex d = derivative(Z);
  return {d.imag(), d.real()};
}

Holomorphic ReflectedField::holomorphic() const {
  Holomorphic h;
  h.f = [this](Complex Z) { return derivative(Z); };
  h.df = [this](Complex Z) { return second_derivative(Z); };
  return h;
}

ReflectedField reflect_odd(const HodographMap& map, const HarmonicFunction& u,
                           const Region& region, double tolerance) {
  ReflectedField field(map, u, region, tolerance);
  if (field.trace_defect() > tolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "not a Dirichlet-zero trace (|U| = %.3e on {Y = 0}, tolerance %.3e)",
                  field.trace_defect(), tolerance);
    throw Error("critical", buf);
  }
  return field;
}

// ---------------------------------------------------------------------------
// Boundary small-gradient measure

SmallGradientTable boundary_small_gradient_measure(const HarmonicFunction& v, const Domain& domain,
                                                   std::vector<double> epsilons,
                                                   std::size_t samples) {
  SmallGradientTable table;
  std::sort(epsilons.begin(), epsilons.end());
  table.epsilons = epsilons;
  table.total_length = domain.boundary().nodal_length();
  auto bs = nodal_boundary_sample(domain, samples);
  std::vector<const Knot*> corners;
  for (const auto& k : domain.boundary().knots())
    if (k.is_corner()) corners.push_back(&k);
  constexpr double h = 1e-3;
  table.samples.resize(bs.size());
  std::vector<char> nonmono(bs.size(), 0);
  parallel_for(bs.size(), [&](std::size_t i) {
    const auto& s = bs[i];
    Point dir = -s.normal;
    Point base = s.point;
    bool corner = false;
    for (const Knot* k : corners)
      if (std::abs(s.point - k->point) < 2 * h) {
        // assess at the knot itself along its inward bisector
        dir = k->inward_bisector();
        base = k->point;
        corner = true;
      }
    double G1 = std::abs(v.gradient(base + h * dir));
    double G2 = std::abs(v.gradient(base + 0.5 * h * dir));
    double G4 = std::abs(v.gradient(base + 0.25 * h * dir));
    double R1 = 2 * G2 - G1, R2 = 2 * G4 - G2;
    double G0 = (4 * R2 - R1) / 3;
    nonmono[i] = !((G1 >= G2 && G2 >= G4) || (G1 <= G2 && G2 <= G4));
    table.samples[i] = {s.point, s.weight, std::max(0.0, G0), corner};
  });
  table.nonmonotone_fraction =
      static_cast<double>(std::count(nonmono.begin(), nonmono.end(), 1)) / static_cast<double>(bs.size());
  table.warning = table.nonmonotone_fraction > 0.05;
  for (double eps : epsilons) {
    double m = 0;
    for (const auto& s : table.samples)
      if (s.gradient < eps) m += s.weight;
    table.measure.push_back(m);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Ledger

namespace {

bool cell_meets_polygon(const Rect& cell, const std::vector<Point>& poly) {
  for (Point c : cell.corners())
    if (polygon_inside(poly, c)) return true;
  for (Point p : poly)
    if (cell.contains(p)) return true;
  auto corners = cell.corners();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    Point a = poly[i], b = poly[(i + 1) % poly.size()];
    for (int k = 0; k < 4; ++k) {
      Point c = corners[k], d = corners[(k + 1) % 4];
      double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
      double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
      if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return true;
    }
  }
  return false;
}

LedgerCount to_ledger(const LocateResult& r, const std::function<bool(Point)>& in_region) {
  LedgerCount c;
  c.conclusive = r.conclusive;
  for (const auto& p : r.points)
    if (in_region(p.location)) {
      c.points.push_back(p);
      ++c.distinct;
      c.with_multiplicity += p.multiplicity;
    }
  if (!r.conclusive) c.note = "inconclusive cells in the subdivision";
  return c;
}

}  // namespace

CriticalSetReport counting_ledger(const AnalyticCompletion& u_completion, const HodographMap& map,
                                  const ReflectedField& U, const Region& region,
                                  const SmallGradientTable& boundary_table) {
  CriticalSetReport rep;
  const auto poly = region.polygon();
  auto near_closure = [&](Point z) {
    return polygon_inside(poly, z) || polygon_distance(poly, z) <= 1e-3;
  };

  // C(u): zeros of F_u' near the closure of E
  Holomorphic fu = derivative_of(u_completion);
  Rect box = region.bounding_box().dilated(1e-2);
  auto keep = [&](const Rect& cell) { return cell_meets_polygon(cell, poly); };
  rep.u = to_ledger(locate_zeros(fu, box, keep), near_closure);

  // cross-check: argument principle on Theta^{-1} of the slightly larger rectangle
  const double eta = 1e-3;
  auto dil = trace_rectangle_preimage(
      map, Rect{-region.a - eta, region.a + eta, -eta, region.b + eta}, 1e-2);
  if (dil) {
    ZeroCount zc = count_zeros_on_contour(fu, polygon_contour(*dil), *dil);
    rep.u_contour_check = zc.count;
    rep.u_cross_check = zc.conclusive && zc.count == rep.u.with_multiplicity;
  } else {
    rep.u.note += rep.u.note.empty() ? "" : "; ";
    rep.u.note += "dilated contour could not be traced";
  }

  // C(Theta): interior zeros of g' inside E plus boundary candidates
  Holomorphic gp = derivative_of(map.completion());
  auto shrunk = trace_rectangle_preimage(
      map, Rect{-region.a + eta, region.a - eta, eta, region.b - eta}, 0.0);
  rep.theta.conclusive = false;
  if (shrunk) {
    ZeroCount zc = count_zeros_on_contour(gp, polygon_contour(*shrunk), *shrunk);
    rep.theta.conclusive = zc.conclusive;
    rep.theta.with_multiplicity = zc.count;
    if (zc.count > 0) {
      Rect sb{1e300, -1e300, 1e300, -1e300};
      for (Point p : *shrunk) {
        sb.x0 = std::min(sb.x0, p.real()), sb.x1 = std::max(sb.x1, p.real());
        sb.y0 = std::min(sb.y0, p.imag()), sb.y1 = std::max(sb.y1, p.imag());
      }
      auto inner = locate_zeros(gp, sb, [&](const Rect& c) { return cell_meets_polygon(c, *shrunk); });
      for (const auto& p : inner.points)
        if (polygon_inside(*shrunk, p.location)) rep.theta.points.push_back(p);
      rep.theta.conclusive = rep.theta.conclusive && inner.conclusive;
    }
  } else {
    rep.theta.note = "interior contour could not be traced";
  }
  rep.theta.distinct = static_cast<int>(rep.theta.points.size());
  // boundary band: consecutive samples below 1e-6 form one candidate
  int boundary_candidates = 0;
  bool in_run = false;
  for (const auto& s : boundary_table.samples) {
    bool small = s.gradient < 1e-6 && near_closure(s.point);
    if (small && !in_run) {
      ++boundary_candidates;
      rep.theta.points.push_back({s.point, 0, s.gradient});
    }
    in_run = small;
  }
  // convex corners of the boundary (interior angle < pi) are zeros of |grad v|
  // that the offset extrapolation cannot resolve
  for (const auto& k : map.domain().boundary().knots())
    if (k.is_corner() && k.interior_angle() < kPi && near_closure(k.point)) {
      bool dup = false;
      for (const auto& p : rep.theta.points) dup = dup || std::abs(p.location - k.point) < 1e-3;
      if (!dup) {
        ++boundary_candidates;
        rep.theta.points.push_back({k.point, 0, 0.0});
      }
    }
  rep.theta.distinct += boundary_candidates;
  if (boundary_candidates) {
    rep.theta.note += rep.theta.note.empty() ? "" : "; ";
    rep.theta.note += "includes boundary candidates (multiplicity 0 = not certified)";
  }

  // C(U): zeros of H' in the reflected rectangle
  Rect reflected{-region.a, region.a, -region.b, region.b};
  rep.U = to_ledger(locate_zeros(U.holomorphic(), reflected), [](Point) { return true; });

  rep.conclusive = rep.u.conclusive && rep.theta.conclusive && rep.U.conclusive && rep.u_cross_check;
  rep.inequality = rep.u.distinct <= rep.theta.distinct + rep.U.distinct;
  if (!rep.u.conclusive) rep.offending = "C(u) subdivision over the E bounding box";
  else if (!rep.u_cross_check) rep.offending = "C(u) contour cross-check on the dilated boundary of E";
  else if (!rep.theta.conclusive) rep.offending = "C(Theta) contour inside E";
  else if (!rep.U.conclusive) rep.offending = "C(U) subdivision of the reflected rectangle";
  return rep;
}

}  // namespace hodomap
