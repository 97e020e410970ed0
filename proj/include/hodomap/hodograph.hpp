#pragma once

#include "hodomap/analytic.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace hodomap {

struct MapDiagnostics {
  double anchor_offset = 0;       ///< |Theta(anchor)|
  double det_defect = 0;          ///< max relative | det DTheta - |grad v|^2 |
  double boundary_image = 0;      ///< max |Y| over nodal boundary samples
  double boundary_tolerance = 0;  ///< allowed |Y| (solver residual)
  std::vector<std::string> failures;
};

/// Theta = (vbar, v) read as the holomorphic map g = vbar + i v.
class HodographMap {
 public:
  HodographMap(AnalyticCompletion completion, Domain domain, double a, double b,
               double boundary_tolerance);

  Complex operator()(Point z) const { return completion_.g(z); }
  Complex gprime(Point z) const { return completion_.gprime(z); }
  Complex gsecond(Point z) const { return completion_.gsecond(z); }
  /// Determinant of the real Jacobian assembled from grad vbar and grad v.
  double det(Point z) const;

  const AnalyticCompletion& completion() const { return completion_; }
  const Domain& domain() const { return domain_; }
  double a() const { return a_; }
  double b() const { return b_; }
  const MapDiagnostics& diagnostics() const { return diag_; }
  bool usable() const { return diag_.failures.empty(); }

  /// Plain Newton iteration on g(z) = Z from `seed`; nullopt when it fails to
  /// reach |g(z) - Z| <= 1e-10 within `max_iter` steps.
  std::optional<Point> newton(Complex Z, Point seed, int max_iter = 50) const;
  /// Certified inverse: converged and inside the domain. Tries the seed, then
  /// 8 fallback seeds from the coarse seed table.
  Point invert(Complex Z, Point seed) const;
  Point invert(Complex Z) const { return invert(Z, seed_for(Z)); }
  /// Inverse allowed to land within `tol` of the boundary (or just outside).
  Point invert_closure(Complex Z, Point seed, double tol = 1e-6) const;
  /// Seed from the coarse table whose image is nearest to Z.
  Point seed_for(Complex Z) const;
  /// Up to k table seeds ordered by distance of their image to Z.
  std::vector<Point> seeds_near(Complex Z, std::size_t k) const;

 private:
  AnalyticCompletion completion_;
  Domain domain_;
  double a_, b_;
  MapDiagnostics diag_;
  std::vector<Point> seeds_;
  std::vector<Complex> seed_images_;
};

/// Verifies the map invariants; diagnostics carry failures. Throws when
/// Theta(anchor) is farther than 1e-4 from the origin.
HodographMap build_map(const AnalyticCompletion& completion, const Domain& domain, double a,
                       double b, double boundary_tolerance);

struct LevelCurve {
  double level = 0;
  std::vector<Point> nodes;  ///< includes both endpoints
  std::array<Point, 2> endpoints{};
  std::size_t boundary_crossings = 0;
  double max_level_defect = 0;
  bool simple = true;
  bool empty() const { return nodes.empty(); }
};

/// Predictor-corrector tracing of {v = level} oriented along J grad v, so the
/// conjugate increases along the curve.
LevelCurve trace_level_curve(const HarmonicFunction& v, const Domain& domain, double level);

struct LevelMonotonicity {
  double level = 0;
  std::size_t nodes = 0;
  double min_increment = 0;
  bool monotone = false;
  bool empty = false;
};

struct InjectivityReport {
  bool pass = false;
  std::vector<LevelMonotonicity> levels;
  std::vector<LevelCurve> curves;  ///< traced curves, one per level
  std::size_t probes = 0;
  std::size_t collisions = 0;
  std::optional<std::array<Point, 2>> witness;
};

/// Monotonicity of vbar along each traced level curve, image collisions over
/// n_probe quasi-random pairs, and a Newton second-preimage search on the
/// first 1000 probe images.
InjectivityReport verify_injectivity(const HodographMap& map, const std::vector<double>& levels,
                                     std::size_t n_probe, unsigned long long seed = 0);

/// E = Theta^{-1}((-a,a) x (0,b)) as four traced sides (counterclockwise:
/// bottom, right, top, left).
struct Region {
  double a = 0, b = 0;
  std::array<std::vector<Point>, 4> sides;
  bool outer_inclusion = false;  ///< E inside Omega and B_1
  bool inner_inclusion = false;  ///< sampled Omega cap B_{1/2} inside E
  double inner_coverage = 0;     ///< fraction of those samples inside E
  int shrink_steps = 0;
  bool automatic = false;
  double closure_gap = 0;  ///< largest mismatch between consecutive side ends

  std::vector<Point> polygon() const;
  bool contains(Point z) const;
  Rect bounding_box() const;
};

/// Traces the preimage of the rectangle boundary and evaluates the outer
/// inclusion; nullopt if a side cannot be followed. `failed_side` receives the
/// first side (0 bottom, 1 right, 2 top, 3 left) that broke either, or -1.
std::optional<Region> trace_region(const HodographMap& map, double a, double b,
                                   int* failed_side = nullptr);
/// Closed counterclockwise polygon through Theta^{-1} of the boundary of an
/// arbitrary image rectangle. The start corner (x0, y0) may lie up to
/// `closure_tol` outside the domain (for rectangles reaching below {Y = 0}).
std::optional<std::vector<Point>> trace_rectangle_preimage(const HodographMap& map,
                                                           const Rect& image, double closure_tol);
/// Explicit (a,b) when given; otherwise the automatic shrink loop.
Region localize_E_r(const HodographMap& map, std::optional<std::array<double, 2>> ab = std::nullopt,
                    unsigned long long seed = 0);

/// Max relative | |grad u|^2 - |det DTheta| |grad U|^2 o Theta | where grad U is
/// recovered by the chain rule at the certified inverse of Theta(z).
double transformation_law_defect(const HodographMap& map, const HarmonicFunction& u,
                                 const std::vector<Point>& points);

/// Quasi-random samples of Omega cap B(anchor, radius).
std::vector<Point> ball_samples(const Domain& domain, double radius, std::size_t n,
                                unsigned long long seed);

}  // namespace hodomap
