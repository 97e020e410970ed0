#include "hodomap/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <queue>

namespace hodomap {

std::string to_string(ConjugateMethod m) {
  switch (m) {
    case ConjugateMethod::ClosedForm: return "closed-form";
    case ConjugateMethod::BranchCuts: return "branch-cuts";
    case ConjugateMethod::PathIntegration: return "path-integration";
  }
  return "unknown";
}

double conjugate_increment(const HarmonicFunction& v, Point a, Point b) {
  Complex pa = 0, pb = 0;
  const auto& poly = v.polynomial();
  for (std::size_t j = poly.size(); j-- > 0;) {
    pa = pa * a + poly[j];
    pb = pb * b + poly[j];
  }
  double inc = (pb - pa).real();
  for (const auto& c : v.charges()) {
    Complex wa = a - c.at, wb = b - c.at;
    if (wa == Complex(0) || wb == Complex(0)) throw Error("analytic", "path through a charge");
    inc += (c.coeff * std::log(wb / wa)).real();
  }
  return inc;
}

double conjugate_along(const HarmonicFunction& v, const std::vector<Point>& path) {
  double sum = 0;
  for (std::size_t i = 1; i < path.size(); ++i) sum += conjugate_increment(v, path[i - 1], path[i]);
  return sum;
}

namespace {

bool ray_hits(const std::vector<Point>& poly, Point origin, Point dir) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point a = poly[i], e = poly[(i + 1) % n] - a;
    double den = cross(dir, e);
    if (std::abs(den) < 1e-300) continue;
    Point w = a - origin;
    double t = cross(w, e) / den;
    double s = cross(w, dir) / den;
    if (t > 0 && s >= -1e-12 && s <= 1 + 1e-12) return true;
  }
  return false;
}

Point nearest_boundary_point(const std::vector<Point>& poly, Point z) {
  double best = 1e300;
  Point arg;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    Point a = poly[i], ab = poly[(i + 1) % poly.size()] - a;
    double t = std::clamp(dot(z - a, ab) / std::norm(ab), 0.0, 1.0);
    Point q = a + t * ab;
    if (std::abs(z - q) < best) best = std::abs(z - q), arg = q;
  }
  return arg;
}

/// Straight segment from an interior point to z stays inside the domain.
bool visible(const Domain& domain, Point from, Point z) {
  double r = std::abs(z - from);
  if (domain.distance_to_boundary(from) > r) return true;
  constexpr int kChecks = 24;
  for (int k = 1; k < kChecks; ++k)
    if (!domain.inside(from + (z - from) * (static_cast<double>(k) / kChecks))) return false;
  return true;
}

/// BFS tree of interior grid nodes carrying Re F(node) - Re F(anchor).
struct PathTable {
  Rect box;
  int nx = 0, ny = 0;
  double hx = 0, hy = 0;
  std::vector<Point> node;
  std::vector<char> valid;
  std::vector<double> value;

  int index(int i, int j) const { return j * nx + i; }
};

std::shared_ptr<PathTable> build_path_table(const HarmonicFunction& v, const Domain& domain) {
  auto t = std::make_shared<PathTable>();
  constexpr int G = 160;
  t->box = domain.bounding_box();
  t->nx = t->ny = G;
  t->hx = t->box.width() / G;
  t->hy = t->box.height() / G;
  t->node.resize(G * G);
  t->valid.assign(G * G, 0);
  t->value.assign(G * G, 0.0);
  const double margin = 0.3 * std::min(t->hx, t->hy);
  parallel_for(G, [&](std::size_t j) {
    for (int i = 0; i < G; ++i) {
      Point z{t->box.x0 + (i + 0.5) * t->hx, t->box.y0 + (static_cast<int>(j) + 0.5) * t->hy};
      int k = t->index(i, static_cast<int>(j));
      t->node[k] = z;
      t->valid[k] = domain.inside(z) && domain.distance_to_boundary(z) > margin;
    }
  });

  // root: valid node nearest the anchor with a straight interior segment to it
  std::vector<int> order;
  for (int k = 0; k < G * G; ++k)
    if (t->valid[k]) order.push_back(k);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(t->node[a] - domain.anchor()) < std::abs(t->node[b] - domain.anchor());
  });
  int root = -1;
  for (std::size_t q = 0; q < std::min<std::size_t>(order.size(), 200); ++q)
    if (visible(domain, t->node[order[q]], domain.anchor())) {
      root = order[q];
      break;
    }
  if (root < 0) throw Error("analytic", "path integration: no interior node sees the anchor");

  std::vector<char> seen(G * G, 0);
  std::queue<int> queue;
  t->value[root] = conjugate_increment(v, domain.anchor(), t->node[root]);
  seen[root] = 1;
  queue.push(root);
  while (!queue.empty()) {
    int c = queue.front();
    queue.pop();
    int ci = c % G, cj = c / G;
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int d = 0; d < 4; ++d) {
      int ni = ci + di[d], nj = cj + dj[d];
      if (ni < 0 || nj < 0 || ni >= G || nj >= G) continue;
      int k = t->index(ni, nj);
      if (!t->valid[k] || seen[k]) continue;
      if (!domain.inside(0.5 * (t->node[c] + t->node[k]))) continue;
      t->value[k] = t->value[c] + conjugate_increment(v, t->node[c], t->node[k]);
      seen[k] = 1;
      queue.push(k);
    }
  }
  for (int k = 0; k < G * G; ++k) t->valid[k] = seen[k];
  return t;
}

double path_value(const PathTable& t, const HarmonicFunction& v, const Domain& domain, Point z) {
  int ci = static_cast<int>(std::floor((z.real() - t.box.x0) / t.hx));
  int cj = static_cast<int>(std::floor((z.imag() - t.box.y0) / t.hy));
  for (int ring = 0; ring <= 6; ++ring) {
    int best = -1;
    double best_d = 1e300;
    for (int j = cj - ring; j <= cj + ring; ++j)
      for (int i = ci - ring; i <= ci + ring; ++i) {
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
        if (i < 0 || j < 0 || i >= t.nx || j >= t.ny) continue;
        int k = t.index(i, j);
        if (!t.valid[k]) continue;
        double d = std::abs(t.node[k] - z);
        if (d < best_d && visible(domain, t.node[k], z)) best = k, best_d = d;
      }
    if (best >= 0) return t.value[best] + conjugate_increment(v, t.node[best], z);
  }
  throw Error("analytic", "path integration: point not reachable from the interior grid");
}

}  // namespace

HarmonicFunction conjugate_by_paths(const HarmonicFunction& v, const Domain& domain) {
  auto table = build_path_table(v, domain);
  // The override already carries the anchor normalization.
  HarmonicFunction base = v;
  auto dom = std::make_shared<const Domain>(domain);
  return v.rotated("conjugate").with_value_override(
      [table, base, dom](Point z) { return path_value(*table, base, *dom, z); });
}

double cr_defect_fd(const HarmonicFunction& v, const HarmonicFunction& vbar,
                    const std::vector<Point>& points, double step) {
  double worst = 0;
  for (Point z : points) {
    Point gv = v.gradient(z);
    double bx = (vbar.value(z + Point(step, 0)) - vbar.value(z - Point(step, 0))) / (2 * step);
    double by = (vbar.value(z + Point(0, step)) - vbar.value(z - Point(0, step))) / (2 * step);
    worst = std::max(worst, std::abs(bx - gv.imag()) + std::abs(by + gv.real()));
  }
  return worst;
}

double cr_residual(const HarmonicFunction& v, const HarmonicFunction& vbar,
                   const std::vector<Point>& points) {
  double worst = 0;
  for (Point z : points) {
    Point gv = v.gradient(z), gb = vbar.gradient(z);
    worst = std::max(worst, std::abs(gb.real() - gv.imag()) + std::abs(gb.imag() + gv.real()));
  }
  return worst;
}

HarmonicFunction conjugate(const HarmonicFunction& v, const Domain& domain,
                           ConjugateReport* report) {
  ConjugateReport rep;
  const Point anchor = domain.anchor();
  HarmonicFunction out;
  if (v.charges().empty()) {
    rep.method = ConjugateMethod::ClosedForm;
    HarmonicFunction raw = v.rotated("conjugate(" + v.name() + ")");
    out = raw.with_shift(-raw.value(anchor));
  } else {
    const auto& poly = domain.polyline();
    std::vector<Point> cuts;
    bool ok = true;
    for (const auto& c : v.charges()) {
      Point away = c.at - domain.centroid();
      Point outward = c.at - nearest_boundary_point(poly, c.at);
      if (std::abs(away) > 0 && !ray_hits(poly, c.at, away)) {
        cuts.push_back(away);
        ++rep.cuts_away_from_centroid;
        continue;
      }
      if (std::abs(outward) > 0 && !ray_hits(poly, c.at, outward)) {
        cuts.push_back(outward);
        ++rep.cuts_outward;
        continue;
      }
      bool found = false;
      double base = std::arg(outward);
      for (int k = 1; k <= 32 && !found; ++k)
        for (int sgn : {1, -1}) {
          Point d = std::polar(1.0, base + sgn * kPi * k / 33.0);
          if (!ray_hits(poly, c.at, d)) {
            cuts.push_back(d);
            found = true;
            break;
          }
        }
      if (!found) {
        ok = false;
        break;
      }
      ++rep.cuts_swept;
    }
    if (ok) {
      HarmonicFunction raw = v.rotated("conjugate").with_cuts(cuts);
      // limit along the inward normal: branch value at the offset point plus
      // the exact increment back to the anchor
      Point p = domain.anchor_inward(1e-6);
      double at_anchor = raw.value(p) + conjugate_increment(v, p, anchor);
      out = raw.with_shift(-at_anchor);
      rep.method = ConjugateMethod::BranchCuts;
      rep.branch_check = cr_defect_fd(v, out, domain.interior_samples(200, 1e-3, 17));
      if (rep.branch_check > 1e-6) ok = false;
    }
    if (!ok) {
      out = conjugate_by_paths(v, domain);
      rep.method = ConjugateMethod::PathIntegration;
      rep.branch_check = cr_defect_fd(v, out, domain.interior_samples(200, 1e-3, 17));
      if (rep.branch_check > 1e-6)
        throw Error("analytic", "conjugate failed: branch cuts and path integration both break CR");
    }
  }
  rep.anchor_value = out.value(anchor);
  if (report) *report = rep;
  return out;
}

AnalyticCompletion::AnalyticCompletion(HarmonicFunction v, HarmonicFunction vbar, Point anchor)
    : v_(std::move(v)), vbar_(std::move(vbar)), anchor_(anchor) {}

AnalyticCompletion completion(const HarmonicFunction& v, const HarmonicFunction& vbar,
                              const Domain& domain, CompletionReport* report) {
  CompletionReport rep;
  auto samples = domain.interior_samples(1000, 1e-3, 19);
  rep.cr_residual = cr_residual(v, vbar, samples);
  std::vector<Point> few(samples.begin(), samples.begin() + 200);
  rep.cr_defect_fd = cr_defect_fd(v, vbar, few);
  for (Point z : samples) {
    double gv = std::abs(v.gradient(z));
    double gp = std::abs(v.derivative(z));
    if (gv > 0) rep.modulus_defect = std::max(rep.modulus_defect, std::abs(gp - gv) / gv);
  }
  rep.anchor_value = vbar.value(domain.anchor());
  if (report) *report = rep;
  if (rep.cr_residual > 1e-8 || rep.cr_defect_fd > 1e-6) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "completion refused: CR residual %.3e (values %.3e)",
                  rep.cr_residual, rep.cr_defect_fd);
    throw Error("analytic", buf);
  }
  return AnalyticCompletion(v, vbar, domain.anchor());
}

}  // namespace hodomap
