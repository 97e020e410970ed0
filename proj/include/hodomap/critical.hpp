#pragma once

#include "hodomap/analytic.hpp"
#include "hodomap/hodograph.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hodomap {

/// f whose zeros are counted, with its derivative. `poles` lists simple poles
/// of f (charge locations); counts inside a contour are corrected for them.
struct Holomorphic {
  std::function<Complex(Complex)> f, df;
  std::vector<Point> poles;
};

Holomorphic derivative_of(const HarmonicFunction& h);  ///< F' with F'' and the charge poles
Holomorphic derivative_of(const AnalyticCompletion& c);

struct ContourPiece {
  std::function<Point(double)> at, velocity;  ///< t in [0,1]
};
std::vector<ContourPiece> polygon_contour(const std::vector<Point>& closed);
std::vector<ContourPiece> rect_contour(const Rect& r);

struct ZeroCount {
  int count = 0;           ///< zeros with multiplicity (poles added back)
  int poles = 0;           ///< poles enclosed
  bool conclusive = false;
  Complex winding;         ///< (1/2 pi i) integral of f'/f
  double min_modulus = 0;  ///< min |f| on the contour nodes
  int nudges = 0;
  std::string note;
};

/// Argument-principle count with adaptive 16-point Gauss-Legendre panels
/// (at most 12 bisection levels per panel).
ZeroCount count_zeros(const Holomorphic& h, const Rect& rect);
ZeroCount count_zeros_on_contour(const Holomorphic& h, const std::vector<ContourPiece>& pieces,
                                 const std::vector<Point>& polygon_for_poles);

struct CriticalPoint {
  Point location;
  int multiplicity = 1;
  double residual = 0;  ///< |f| after polish
};

struct LocateResult {
  std::vector<CriticalPoint> points;
  bool conclusive = true;
  int total = 0;  ///< count on the enclosing rectangle
  std::vector<Rect> inconclusive_cells;
};

/// Recursive subdivision until each cell holds at most one distinct zero, then
/// Newton polish (multiplicity-aware). Cells for which `keep` is false are
/// dropped before counting.
LocateResult locate_zeros(const Holomorphic& h, const Rect& rect,
                          const std::function<bool(const Rect&)>& keep = {});
LocateResult locate_critical_points(const AnalyticCompletion& c, const Rect& rect);

/// Interior critical points of a function on its domain: argument-principle
/// count of F' on the boundary contour with circular detours of radius
/// `corner_margin` around corners.
struct InteriorCriticalReport {
  int count = 0;
  bool conclusive = false;
  double winding_distance = 0;  ///< distance of the winding number to the nearest integer
  std::vector<CriticalPoint> located;  ///< grid argmin + Newton witnesses (diagnostic)
};
InteriorCriticalReport verify_no_interior_critical_points(const HarmonicFunction& h,
                                                          const Domain& domain,
                                                          double corner_margin = 1e-3);

// ---------------------------------------------------------------------------
// Reflection

/// U = u o Theta^{-1} on the image rectangle, extended oddly across {Y = 0}.
class ReflectedField {
 public:
  ReflectedField(const HodographMap& map, HarmonicFunction u, const Region& region,
                 double tolerance);

  double value(Complex Z) const;
  Complex derivative(Complex Z) const;         ///< H' with U = Im H
  Complex second_derivative(Complex Z) const;  ///< H''
  Point gradient(Complex Z) const;             ///< (U_X, U_Y)
  double trace_defect() const { return trace_defect_; }
  double tolerance() const { return tolerance_; }
  Holomorphic holomorphic() const;

 private:
  Point preimage(Complex Z) const;

  const HodographMap* map_;
  HarmonicFunction u_;
  Region region_;
  double tolerance_ = 0;
  double trace_defect_ = 0;
};

/// Errors with "not a Dirichlet-zero trace" when |U| exceeds the tolerance on
/// sampled points of {Y = 0} within the region.
ReflectedField reflect_odd(const HodographMap& map, const HarmonicFunction& u,
                           const Region& region, double tolerance);

// ---------------------------------------------------------------------------
// Boundary small-gradient measure

struct BoundaryGradientSample {
  Point point;
  double weight = 0;
  double gradient = 0;  ///< extrapolated |grad v| at the boundary
  bool corner = false;
};

struct SmallGradientTable {
  std::vector<double> epsilons;
  std::vector<double> measure;
  double total_length = 0;  ///< nodal arc length
  double nonmonotone_fraction = 0;
  bool warning = false;
  std::vector<BoundaryGradientSample> samples;
};

SmallGradientTable boundary_small_gradient_measure(const HarmonicFunction& v, const Domain& domain,
                                                   std::vector<double> epsilons,
                                                   std::size_t samples = 8192);

// ---------------------------------------------------------------------------
// Ledger

struct LedgerCount {
  int distinct = 0;
  int with_multiplicity = 0;
  bool conclusive = false;
  std::vector<CriticalPoint> points;
  std::string note;
};

struct CriticalSetReport {
  LedgerCount u;      ///< C(u) in the closure of E (z-plane)
  LedgerCount theta;  ///< C(Theta) in the closure of E, interior + boundary candidates
  LedgerCount U;      ///< C(U) in the reflected rectangle (Z-plane)
  int u_contour_check = 0;  ///< zeros of F_u' inside the dilated boundary of E
  bool u_cross_check = false;
  bool inequality = false;
  bool conclusive = false;
  std::string offending;
};

CriticalSetReport counting_ledger(const AnalyticCompletion& u_completion, const HodographMap& map,
                                  const ReflectedField& U, const Region& region,
                                  const SmallGradientTable& boundary_table);

}  // namespace hodomap
