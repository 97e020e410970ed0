#include "hodomap/geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace hodomap {

std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::Lipschitz: return "Lipschitz";
    case Smoothness::C1: return "C1";
    case Smoothness::C1Dini: return "C1Dini";
    case Smoothness::C1DMO: return "C1DMO";
  }
  return "unknown";
}

namespace {

double dmo_phi_closed(double x) {
  if (x == 0.0) return 0.0;
  return x / std::sqrt(std::abs(std::log(std::abs(x))));
}

double dmo_dphi_closed(double x) {
  if (x == 0.0) return 0.0;
  double L = std::abs(std::log(std::abs(x)));
  return 1.0 / std::sqrt(L) + 0.5 / (L * std::sqrt(L));
}

}  // namespace

double dmo_phi(double x) {
  if (!(std::abs(x) < 0.5)) throw Error("geometry", "dmo_phi: |x| must be < 1/2");
  return dmo_phi_closed(x);
}

double dmo_dphi(double x) {
  if (!(std::abs(x) < 0.5)) throw Error("geometry", "dmo_dphi: |x| must be < 1/2");
  return dmo_dphi_closed(x);
}

GraphParametrization flat_graph() {
  return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, Smoothness::C1, {}};
}

GraphParametrization dmo_graph() {
  // The domain builder evaluates the closed interval [-1/2, 1/2]; the
  // formula extends continuously to the endpoints.
  auto guard = [](double x) {
    if (std::abs(x) > 0.5) throw Error("geometry", "dmo graph evaluated outside |x| <= 1/2");
    return x;
  };
  return {"dmo", [guard](double x) { return dmo_phi_closed(guard(x)); },
          [guard](double x) { return dmo_dphi_closed(guard(x)); }, Smoothness::C1DMO, {}};
}

GraphParametrization corner_graph() {
  return {"corner", [](double x) { return std::abs(x); },
          [](double x) { return x < 0 ? -1.0 : 1.0; }, Smoothness::Lipschitz, {0.0}};
}

GraphParametrization polyline_graph(std::vector<Point> nodes) {
  if (nodes.size() < 2) throw Error("geometry", "polyline graph needs at least two nodes");
  std::sort(nodes.begin(), nodes.end(),
            [](Point a, Point b) { return a.real() < b.real(); });
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i].real() > nodes[i - 1].real()))
      throw Error("geometry", "polyline graph nodes must have distinct abscissae");
  auto locate = [nodes](double x) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x,
                               [](double v, Point p) { return v < p.real(); });
    std::size_t i = std::clamp<std::ptrdiff_t>(it - nodes.begin(), 1,
                                               static_cast<std::ptrdiff_t>(nodes.size()) - 1);
    return i;
  };
  auto phi = [nodes, locate](double x) {
    std::size_t i = locate(x);
    Point a = nodes[i - 1], b = nodes[i];
    double t = (x - a.real()) / (b.real() - a.real());
    return a.imag() + t * (b.imag() - a.imag());
  };
  auto dphi = [nodes, locate](double x) {
    std::size_t i = locate(x);
    Point a = nodes[i - 1], b = nodes[i];
    return (b.imag() - a.imag()) / (b.real() - a.real());
  };
  std::vector<double> kinks;
  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) kinks.push_back(nodes[i].real());
  if (std::abs(phi(0.0)) > 1e-14) throw Error("geometry", "polyline graph must pass through 0");
  return {"custom-polyline", phi, dphi, Smoothness::Lipschitz, kinks};
}

// ---------------------------------------------------------------------------
// Segment

Segment::Segment(std::function<Point(double)> at, std::function<Point(double)> velocity,
                 BoundaryRole role, std::string label)
    : at_(std::move(at)), velocity_(std::move(velocity)), role_(role), label_(std::move(label)) {
  build_arclength_table();
}

Segment Segment::line(Point a, Point b, BoundaryRole role) {
  return Segment([a, b](double t) { return a + t * (b - a); }, [a, b](double) { return b - a; },
                 role, "line");
}

Segment Segment::arc(Point center, double radius, double theta0, double theta1,
                     BoundaryRole role) {
  return Segment(
      [=](double t) { return center + std::polar(radius, theta0 + t * (theta1 - theta0)); },
      [=](double t) {
        return Complex(0, 1) * std::polar(radius * (theta1 - theta0), theta0 + t * (theta1 - theta0));
      },
      role, "arc");
}

Segment Segment::ellipse(Point center, double a, double b, double theta0, double theta1,
                         BoundaryRole role) {
  return Segment(
      [=](double t) {
        double th = theta0 + t * (theta1 - theta0);
        return center + Point(a * std::cos(th), b * std::sin(th));
      },
      [=](double t) {
        double th = theta0 + t * (theta1 - theta0);
        return (theta1 - theta0) * Point(-a * std::sin(th), b * std::cos(th));
      },
      role, "ellipse");
}

Segment Segment::graph(std::shared_ptr<const GraphParametrization> g, double x0, double x1,
                       BoundaryRole role) {
  return Segment(
      [=](double t) {
        double x = x0 + t * (x1 - x0);
        return Point(x, g->phi(x));
      },
      [=](double t) {
        // one-sided slope at the ends so kinks between pieces are resolved
        double x = x0 + std::clamp(t, 1e-13, 1 - 1e-13) * (x1 - x0);
        return (x1 - x0) * Point(1.0, g->dphi(x));
      },
      role, "graph:" + g->name);
}

void Segment::build_arclength_table() {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto speed = [this](double t) { return std::abs(velocity_(t)); };
  constexpr int kPanels = 64;
  panel_t_.assign(1, 0.0);
  panel_s_.assign(1, 0.0);
  // Adaptive refinement keeps every panel smooth enough for the fixed
  // Gauss rule used when inverting arc length.
  std::function<void(double, double, int)> refine = [&](double a, double b, int depth) {
    double err = 0;
    double whole = GK::integrate(speed, a, b, 0, 0, &err);
    double m = 0.5 * (a + b);
    double halves = GK::integrate(speed, a, m, 0, 0) + GK::integrate(speed, m, b, 0, 0);
    if (std::abs(whole - halves) > 1e-15 * std::max(1.0, whole) && depth < 40) {
      refine(a, m, depth + 1);
      refine(m, b, depth + 1);
      return;
    }
    if (!std::isfinite(halves) || std::abs(whole - halves) > 1e-9 * std::max(1.0, whole))
      throw Error("geometry", "arc-length quadrature failed to converge on segment " + label_);
    panel_t_.push_back(b);
    panel_s_.push_back(panel_s_.back() + halves);
  };
  for (int i = 0; i < kPanels; ++i)
    refine(static_cast<double>(i) / kPanels, static_cast<double>(i + 1) / kPanels, 0);
  if (!(panel_s_.back() > 0) || !std::isfinite(panel_s_.back()))
    throw Error("geometry", "segment " + label_ + " has non-positive or infinite length");
}

double Segment::parameter_at(double s) const {
  if (s <= 0) return 0.0;
  if (s >= length()) return 1.0;
  auto it = std::upper_bound(panel_s_.begin(), panel_s_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - panel_s_.begin()) - 1;
  double a = panel_t_[i], b = panel_t_[i + 1];
  double target = s - panel_s_[i];
  const auto& xs = GaussLegendre16::nodes();
  const auto& ws = GaussLegendre16::weights();
  auto partial = [&](double t) {
    double sum = 0, h = 0.5 * (t - a);
    for (std::size_t k = 0; k < xs.size(); ++k)
      sum += ws[k] * std::abs(velocity_(a + h * (xs[k] + 1.0)));
    return sum * h;
  };
  double lo = a, hi = b;
  double t = a + (b - a) * target / (panel_s_[i + 1] - panel_s_[i]);
  for (int iter = 0; iter < 60; ++iter) {
    double f = partial(t) - target;
    if (f > 0) hi = t; else lo = t;
    if (std::abs(f) < 1e-15 * std::max(1.0, length())) break;
    double speed = std::abs(velocity_(t));
    double next = speed > 0 ? t - f / speed : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) < 1e-17) break;
    t = next;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Knots and curve

bool Knot::is_corner() const { return std::abs(turn) > 1e-6; }
double Knot::interior_angle() const { return kPi - turn; }
Point Knot::inward_bisector() const {
  return tangent_out * std::polar(1.0, 0.5 * interior_angle());
}

BoundaryCurve::BoundaryCurve(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error("geometry", "boundary curve needs at least one segment");
  offsets_.assign(1, 0.0);
  bool free_seen = false;
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& seg = segments_[i];
    const auto& next = segments_[(i + 1) % segments_.size()];
    if (std::abs(seg.end() - next.start()) > 1e-12)
      throw Error("geometry", "boundary curve is not closed at segment " + std::to_string(i));
    offsets_.push_back(offsets_.back() + seg.length());
    if (seg.role() == BoundaryRole::Free) {
      free_seen = true;
    } else {
      if (free_seen) throw Error("geometry", "nodal segments must precede free segments");
      nodal_length_ = offsets_.back();
    }
  }
  if (signed_area() <= 0) throw Error("geometry", "boundary curve must be counterclockwise");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    std::size_t prev = (i + segments_.size() - 1) % segments_.size();
    Knot k;
    k.point = segments_[i].start();
    k.s = offsets_[i];
    k.incoming = prev;
    k.outgoing = i;
    k.tangent_in = segments_[prev].velocity(1.0);
    k.tangent_in /= std::abs(k.tangent_in);
    k.tangent_out = segments_[i].velocity(0.0);
    k.tangent_out /= std::abs(k.tangent_out);
    k.turn = std::arg(k.tangent_out / k.tangent_in);
    knots_.push_back(k);
  }
}

std::size_t BoundaryCurve::segment_index(double s) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), s);
  std::ptrdiff_t i = (it - offsets_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(segments_.size()) - 1));
}

namespace {
double wrap(double s, double L) {
  double r = std::fmod(s, L);
  return r < 0 ? r + L : r;
}
}  // namespace

Point BoundaryCurve::point_at(double s) const {
  s = wrap(s, length());
  std::size_t i = segment_index(s);
  return segments_[i].at(segments_[i].parameter_at(s - offsets_[i]));
}

Point BoundaryCurve::tangent_at(double s) const {
  s = wrap(s, length());
  std::size_t i = segment_index(s);
  Point v = segments_[i].velocity(segments_[i].parameter_at(s - offsets_[i]));
  return v / std::abs(v);
}

Point BoundaryCurve::normal_at(double s) const {
  Point t = tangent_at(s);
  return {t.imag(), -t.real()};
}

std::vector<Point> BoundaryCurve::polyline(std::size_t n) const {
  std::vector<Point> out;
  double L = length();
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& seg = segments_[i];
    std::size_t k = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(n * seg.length() / L)));
    for (std::size_t j = 0; j < k; ++j) {
      double s = seg.length() * static_cast<double>(j) / static_cast<double>(k);
      out.push_back(seg.at(seg.parameter_at(s)));
    }
  }
  return out;
}

double BoundaryCurve::signed_area() const {
  // Green's theorem with Gauss-Legendre on each segment.
  const auto& xs = GaussLegendre16::nodes();
  const auto& ws = GaussLegendre16::weights();
  double area = 0;
  for (const auto& seg : segments_) {
    constexpr int kPanels = 64;
    for (int p = 0; p < kPanels; ++p) {
      double a = static_cast<double>(p) / kPanels, h = 0.5 / kPanels;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        double t = a + h * (xs[k] + 1.0);
        area += 0.5 * ws[k] * h * cross(seg.at(t), seg.velocity(t));
      }
    }
  }
  return area;
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(BoundaryCurve boundary, Point anchor, double clip_radius, Smoothness smoothness,
               std::string kind)
    : boundary_(std::move(boundary)),
      anchor_(anchor),
      clip_radius_(clip_radius),
      smoothness_(smoothness),
      kind_(std::move(kind)) {
  if (!(clip_radius_ > 0)) throw Error("geometry", "clip radius must be positive");
  polyline_ = boundary_.polyline(2048);
  // anchor arc-length coordinate: nearest vertex, then local refinement
  double L = boundary_.length();
  double best_s = 0, best_d = 1e300;
  for (std::size_t i = 0; i < boundary_.knots().size(); ++i) {
    double d = std::abs(boundary_.knots()[i].point - anchor);
    if (d < best_d) best_d = d, best_s = boundary_.knots()[i].s;
  }
  if (best_d > 1e-12) {
    constexpr int kScan = 8192;
    for (int i = 0; i < kScan; ++i) {
      double s = L * i / kScan;
      double d = std::abs(boundary_.point_at(s) - anchor);
      if (d < best_d) best_d = d, best_s = s;
    }
    double lo = best_s - L / kScan, hi = best_s + L / kScan;
    for (int iter = 0; iter < 200; ++iter) {
      double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
      if (std::abs(boundary_.point_at(m1) - anchor) < std::abs(boundary_.point_at(m2) - anchor))
        hi = m2;
      else
        lo = m1;
    }
    best_s = wrap(0.5 * (lo + hi), L);
  }
  anchor_s_ = best_s;

  double area = 0;
  Point c = 0;
  for (std::size_t i = 0; i < polyline_.size(); ++i) {
    Point a = polyline_[i], b = polyline_[(i + 1) % polyline_.size()];
    double w = cross(a, b);
    area += w;
    c += w * (a + b);
  }
  centroid_ = c / (3.0 * area);
  bbox_ = {1e300, -1e300, 1e300, -1e300};
  for (Point p : polyline_) {
    bbox_.x0 = std::min(bbox_.x0, p.real());
    bbox_.x1 = std::max(bbox_.x1, p.real());
    bbox_.y0 = std::min(bbox_.y0, p.imag());
    bbox_.y1 = std::max(bbox_.y1, p.imag());
  }

  constexpr std::size_t kBands = 128;
  bands_.assign(kBands, {});
  const std::size_t n = polyline_.size();
  const double band_h = bbox_.height() / static_cast<double>(kBands);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = std::min(polyline_[i].imag(), polyline_[(i + 1) % n].imag());
    double hi = std::max(polyline_[i].imag(), polyline_[(i + 1) % n].imag());
    auto b0 = static_cast<std::size_t>(std::clamp((lo - bbox_.y0) / band_h, 0.0, kBands - 1.0));
    auto b1 = static_cast<std::size_t>(std::clamp((hi - bbox_.y0) / band_h, 0.0, kBands - 1.0));
    for (std::size_t b = b0; b <= b1; ++b) bands_[b].push_back(static_cast<std::uint32_t>(i));
  }
}

bool Domain::inside(Point z) const {
  // only segments straddling z.imag() can change the winding number
  if (!(z.imag() >= bbox_.y0 && z.imag() <= bbox_.y1)) return false;
  // same arithmetic as the construction, so band(lo) <= band(y) <= band(hi)
  const double band_h = bbox_.height() / static_cast<double>(bands_.size());
  const auto band = static_cast<std::size_t>(
      std::clamp((z.imag() - bbox_.y0) / band_h, 0.0, static_cast<double>(bands_.size()) - 1.0));
  int winding = 0;
  const std::size_t n = polyline_.size();
  for (std::uint32_t i : bands_[band]) {
    Point a = polyline_[i], b = polyline_[(i + 1) % n];
    double side = cross(b - a, z - a);
    if (a.imag() <= z.imag()) {
      if (b.imag() > z.imag() && side > 0) ++winding;
    } else if (b.imag() <= z.imag() && side < 0) {
      --winding;
    }
  }
  return winding != 0;
}

double Domain::distance_to_boundary(Point z) const {
  double best = 1e300;
  const std::size_t n = polyline_.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point a = polyline_[i], b = polyline_[(i + 1) % n];
    Point ab = b - a;
    double t = std::clamp(dot(z - a, ab) / std::norm(ab), 0.0, 1.0);
    best = std::min(best, std::abs(z - (a + t * ab)));
  }
  return best;
}

Point Domain::anchor_inward(double step) const {
  for (const auto& k : boundary_.knots())
    if (k.is_corner() && std::abs(k.point - anchor_) < 1e-12)
      return anchor_ + step * k.inward_bisector();
  return anchor_ - step * boundary_.normal_at(anchor_s_);
}

std::vector<Point> Domain::interior_samples(std::size_t n, double margin,
                                            unsigned long long seed) const {
  std::vector<Point> out;
  QuasiRandom2D qr(seed);
  std::size_t attempts = 0;
  while (out.size() < n) {
    if (++attempts > 400 * n + 10000)
      throw Error("geometry", "could not draw interior samples with the requested margin");
    Point u = qr.next();
    Point z{bbox_.x0 + u.real() * bbox_.width(), bbox_.y0 + u.imag() * bbox_.height()};
    if (std::abs(z - anchor_) >= clip_radius_) continue;
    if (!inside(z)) continue;
    if (margin > 0 && distance_to_boundary(z) < margin) continue;
    out.push_back(z);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Constructors

Domain make_graph_domain(const GraphParametrization& phi_in, double half_width) {
  if (!(half_width > 0 && half_width <= 1))
    throw Error("geometry", "graph half width must lie in (0, 1]");
  auto phi = std::make_shared<const GraphParametrization>(phi_in);
  constexpr int kCheck = 4001;
  for (int i = 0; i < kCheck; ++i) {
    double x = -half_width + 2 * half_width * i / (kCheck - 1);
    double y = phi->phi(x);
    if (!std::isfinite(y) || !std::isfinite(phi->dphi(x)))
      throw Error("geometry", "graph has non-finite values");
    if (std::abs(Point(x, y)) > 1 + 1e-12) throw Error("geometry", "graph exits the unit ball");
  }
  if (std::abs(phi->phi(0.0)) > 1e-14) throw Error("geometry", "graph must satisfy phi(0) = 0");

  std::vector<double> cuts{-half_width, 0.0, half_width};
  for (double k : phi->kinks)
    if (k > -half_width && k < half_width) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Segment> segs;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    segs.push_back(Segment::graph(phi, cuts[i], cuts[i + 1], BoundaryRole::Nodal));

  const double rim = std::sqrt(std::max(0.0, 1 - half_width * half_width));
  Point right(half_width, phi->phi(half_width));
  Point left(-half_width, phi->phi(-half_width));
  double theta_r, theta_l;
  if (std::abs(std::abs(right) - 1) < 1e-12) {
    theta_r = std::arg(right);
  } else {
    Point top(half_width, rim);
    segs.push_back(Segment::line(right, top, BoundaryRole::Free));
    theta_r = std::arg(top);
  }
  Point left_rim;
  bool left_on_circle = std::abs(std::abs(left) - 1) < 1e-12;
  if (left_on_circle) {
    left_rim = left;
  } else {
    left_rim = left.imag() >= 0 ? Point(-half_width, rim) : Point(-half_width, -rim);
  }
  theta_l = std::arg(left_rim);
  while (theta_l <= theta_r) theta_l += 2 * kPi;
  segs.push_back(Segment::arc(0.0, 1.0, theta_r, theta_l, BoundaryRole::Free));
  if (!left_on_circle) segs.push_back(Segment::line(segs.back().end(), left, BoundaryRole::Free));
  return Domain(BoundaryCurve(std::move(segs)), 0.0, 1.0, phi->smoothness, "graph:" + phi->name);
}

Domain make_halfdisk() { return make_graph_domain(flat_graph(), 1.0); }

Domain make_disk() {
  Point start(1.0, 0.0);
  Segment circle([=](double t) { return t <= 0.0 || t >= 1.0 ? start : std::polar(1.0, 2 * kPi * t); },
                 [](double t) { return Complex(0, 2 * kPi) * std::polar(1.0, 2 * kPi * t); },
                 BoundaryRole::Free, "circle");
  return Domain(BoundaryCurve({circle}), start, 1.0, Smoothness::C1, "disk");
}

Domain make_ellipse(double a, double b) {
  Point start(a, 0.0);
  Segment e([=](double t) {
              return t <= 0.0 || t >= 1.0 ? start : Point(a * std::cos(2 * kPi * t), b * std::sin(2 * kPi * t));
            },
            [=](double t) { return 2 * kPi * Point(-a * std::sin(2 * kPi * t), b * std::cos(2 * kPi * t)); },
            BoundaryRole::Free, "ellipse");
  return Domain(BoundaryCurve({e}), start, std::max(a, b) * 2.0, Smoothness::C1, "ellipse");
}

Domain make_polygon_domain(std::vector<Point> vertices, std::size_t nodal_edges, Point anchor) {
  if (vertices.size() < 3) throw Error("geometry", "polygon needs at least three vertices");
  if (nodal_edges > vertices.size()) throw Error("geometry", "more nodal edges than edges");
  std::vector<Segment> segs;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    segs.push_back(Segment::line(vertices[i], vertices[(i + 1) % vertices.size()],
                                 i < nodal_edges ? BoundaryRole::Nodal : BoundaryRole::Free));
  BoundaryCurve curve(std::move(segs));
  double best = 1e300;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    Point a = vertices[i], b = vertices[(i + 1) % vertices.size()];
    double t = std::clamp(dot(anchor - a, b - a) / std::norm(b - a), 0.0, 1.0);
    best = std::min(best, std::abs(anchor - (a + t * (b - a))));
  }
  if (best > 1e-12) throw Error("geometry", "polygon anchor must lie on the boundary");
  return Domain(std::move(curve), anchor, 1.0, Smoothness::Lipschitz, "polygon");
}

// ---------------------------------------------------------------------------
// Operations

double chord_arc_constant(const Domain& domain, std::size_t n_pairs) {
  if (n_pairs < 2) throw Error("geometry", "chord_arc_constant needs at least two pairs");
  const auto& curve = domain.boundary();
  const double L = curve.length();
  QuasiRandom2D qr(0);
  double sup = 0;
  bool any = false;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    Point u = qr.next();
    double s1 = u.real() * L, s2 = u.imag() * L;
    double chord = std::abs(curve.point_at(s1) - curve.point_at(s2));
    if (chord < 1e-12) continue;
    double gap = std::abs(s1 - s2);
    double arc = std::min(gap, L - gap);
    sup = std::max(sup, arc / chord);
    any = true;
  }
  if (!any) throw Error("geometry", "chord_arc_constant: all sampled pairs were degenerate");
  return sup;
}

namespace {

std::vector<BoundarySample> sample_segments(const Domain& domain, std::size_t n,
                                            const std::vector<std::size_t>& which) {
  const auto& curve = domain.boundary();
  double total = 0;
  for (std::size_t i : which) total += curve.segment(i).length();
  // largest-remainder apportionment, at least one cell per segment
  std::vector<std::size_t> counts(which.size(), 1);
  std::size_t assigned = which.size();
  if (n < assigned) n = assigned;
  std::vector<std::pair<double, std::size_t>> remainders;
  for (std::size_t j = 0; j < which.size(); ++j) {
    double share = static_cast<double>(n) * curve.segment(which[j]).length() / total;
    std::size_t extra = static_cast<std::size_t>(std::max(0.0, std::floor(share) - 1));
    counts[j] += extra;
    assigned += extra;
    remainders.push_back({share - std::floor(share), j});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](auto a, auto b) { return a.first > b.first; });
  for (std::size_t r = 0; assigned < n; ++r, ++assigned) ++counts[remainders[r % remainders.size()].second];

  std::vector<double> corner_s;
  for (const auto& k : curve.knots())
    if (k.is_corner()) corner_s.push_back(k.s);
  const double L = curve.length();
  const double flag_radius = 2.0 * total / static_cast<double>(n);

  std::vector<BoundarySample> out;
  for (std::size_t j = 0; j < which.size(); ++j) {
    const auto& seg = curve.segment(which[j]);
    double h = seg.length() / static_cast<double>(counts[j]);
    for (std::size_t c = 0; c < counts[j]; ++c) {
      double local = (static_cast<double>(c) + 0.5) * h;
      double t = seg.parameter_at(local);
      BoundarySample bs;
      bs.point = seg.at(t);
      Point v = seg.velocity(t);
      bs.tangent = v / std::abs(v);
      bs.normal = {bs.tangent.imag(), -bs.tangent.real()};
      bs.s = curve.segment_offset(which[j]) + local;
      bs.weight = h;
      bs.segment = which[j];
      for (double cs : corner_s) {
        double gap = std::abs(bs.s - cs);
        if (std::min(gap, L - gap) < flag_radius) bs.near_corner = true;
      }
      out.push_back(bs);
    }
  }
  return out;
}

}  // namespace

std::vector<BoundarySample> boundary_sample(const Domain& domain, std::size_t n) {
  if (n < 8) throw Error("geometry", "boundary_sample needs n >= 8");
  std::vector<std::size_t> all(domain.boundary().size());
  std::iota(all.begin(), all.end(), 0);
  return sample_segments(domain, n, all);
}

std::vector<BoundarySample> nodal_boundary_sample(const Domain& domain, std::size_t n) {
  std::vector<std::size_t> nodal;
  for (std::size_t i = 0; i < domain.boundary().size(); ++i)
    if (domain.boundary().segment(i).role() == BoundaryRole::Nodal) nodal.push_back(i);
  if (nodal.empty()) return {};
  return sample_segments(domain, n, nodal);
}

namespace {

bool segments_cross(Point a, Point b, Point c, Point d) {
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

}  // namespace

std::vector<std::string> validate_domain(const Domain& domain) {
  std::vector<std::string> problems;
  const auto& curve = domain.boundary();
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (std::abs(curve.segment(i).end() - curve.segment((i + 1) % curve.size()).start()) > 1e-12)
      problems.push_back("boundary not closed at segment " + std::to_string(i));
    if (!(curve.segment(i).length() > 0)) problems.push_back("segment with non-positive length");
  }
  const auto& poly = domain.polyline();
  const std::size_t n = poly.size();
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      ++pairs;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) {
        problems.push_back("boundary polyline self-intersects");
        i = n;
        break;
      }
    }
  }
  if (pairs < 10000) problems.push_back("too few pairs checked for simplicity");
  if (std::abs(curve.point_at(domain.anchor_s()) - domain.anchor()) > 1e-12)
    problems.push_back("anchor not on boundary");

  auto interior = domain.interior_samples(1, 0.05 * std::min(domain.bounding_box().width(),
                                                               domain.bounding_box().height()));
  if (!domain.inside(interior.front())) problems.push_back("interior sample reported outside");
  for (int k = 0; k < 16; ++k) {
    Point far = domain.anchor() + std::polar(2 * domain.clip_radius() + 1e-9, 2 * kPi * k / 16);
    if (domain.inside(far) && std::abs(far - domain.anchor()) > 2 * domain.clip_radius()) {
      // only meaningful when the domain is localized in the clip ball
      if (domain.kind() != "ellipse") problems.push_back("point at twice the clip radius is inside");
    }
  }

  // flood fill of inside ∩ B(anchor, clip) on a 256^2 grid
  constexpr int G = 256;
  const double R = domain.clip_radius();
  Rect box = domain.bounding_box();
  box.x0 = std::max(box.x0, domain.anchor().real() - R);
  box.x1 = std::min(box.x1, domain.anchor().real() + R);
  box.y0 = std::max(box.y0, domain.anchor().imag() - R);
  box.y1 = std::min(box.y1, domain.anchor().imag() + R);
  std::vector<char> mask(G * G, 0);
  int first = -1, count = 0;
  for (int j = 0; j < G; ++j) {
    for (int i = 0; i < G; ++i) {
      Point z{box.x0 + (i + 0.5) * box.width() / G, box.y0 + (j + 0.5) * box.height() / G};
      if (std::abs(z - domain.anchor()) < R && domain.inside(z)) {
        mask[j * G + i] = 1;
        ++count;
        if (first < 0) first = j * G + i;
      }
    }
  }
  if (first >= 0) {
    std::queue<int> q;
    q.push(first);
    mask[first] = 2;
    int reached = 1;
    while (!q.empty()) {
      int c = q.front();
      q.pop();
      int ci = c % G, cj = c / G;
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        int ni = ci + di[k], nj = cj + dj[k];
        if (ni < 0 || nj < 0 || ni >= G || nj >= G) continue;
        int idx = nj * G + ni;
        if (mask[idx] == 1) {
          mask[idx] = 2;
          ++reached;
          q.push(idx);
        }
      }
    }
    if (reached != count) problems.push_back("localized region is not connected");
  } else {
    problems.push_back("localized region is empty");
  }
  return problems;
}

}  // namespace hodomap
