#pragma once

#include "hodomap/solver.hpp"

#include <string>
#include <vector>

namespace hodomap {

enum class ConjugateMethod { ClosedForm, BranchCuts, PathIntegration };
std::string to_string(ConjugateMethod m);

struct ConjugateReport {
  ConjugateMethod method = ConjugateMethod::ClosedForm;
  std::size_t cuts_away_from_centroid = 0;  ///< charges whose first-choice cut was valid
  std::size_t cuts_outward = 0;             ///< charges needing the offset direction
  std::size_t cuts_swept = 0;               ///< charges needing a direction sweep
  double branch_check = 0;  ///< worst finite-difference CR defect of the values
  double anchor_value = 0;  ///< conjugate evaluated at the anchor
};

/// Increment of Re F along the straight segment a -> b. Exact for any segment
/// that avoids the charges (each Log changes by the principal Log of the ratio).
double conjugate_increment(const HarmonicFunction& v, Point a, Point b);
/// Sum of increments along a polyline.
double conjugate_along(const HarmonicFunction& v, const std::vector<Point>& path);

/// Harmonic conjugate with grad(conjugate) = J grad(v), J = [[0,1],[-1,0]],
/// normalized to vanish at the domain anchor (approached along the inward normal).
HarmonicFunction conjugate(const HarmonicFunction& v, const Domain& domain,
                           ConjugateReport* report = nullptr);

/// Force the path-integration realization (used as fallback and in tests).
HarmonicFunction conjugate_by_paths(const HarmonicFunction& v, const Domain& domain);

/// Worst |d_x vbar - d_y v| + |d_y vbar + d_x v| over the points, with the
/// derivatives of vbar taken by central differences of its values.
double cr_defect_fd(const HarmonicFunction& v, const HarmonicFunction& vbar,
                    const std::vector<Point>& points, double step = 1e-5);
/// Same with the analytic gradient of vbar.
double cr_residual(const HarmonicFunction& v, const HarmonicFunction& vbar,
                   const std::vector<Point>& points);

/// g = vbar + i v with g' and g''.
class AnalyticCompletion {
 public:
  AnalyticCompletion(HarmonicFunction v, HarmonicFunction vbar, Point anchor);

  const HarmonicFunction& base() const { return v_; }
  const HarmonicFunction& conjugate() const { return vbar_; }
  Point anchor() const { return anchor_; }

  Complex g(Point z) const { return {vbar_.value(z), v_.value(z)}; }
  Complex gprime(Point z) const { return v_.derivative(z); }
  Complex gsecond(Point z) const { return v_.second_derivative(z); }

 private:
  HarmonicFunction v_, vbar_;
  Point anchor_;
};

struct CompletionReport {
  double cr_residual = 0;     ///< analytic gradients, 10^3 samples
  double cr_defect_fd = 0;    ///< finite-difference check of the values
  double modulus_defect = 0;  ///< max relative | |g'| - |grad v| |
  double anchor_value = 0;
};

/// Validates the pair on interior samples and refuses to build a completion
/// whose CR residual exceeds 1e-8 (or whose values break CR by more than 1e-6).
AnalyticCompletion completion(const HarmonicFunction& v, const HarmonicFunction& vbar,
                              const Domain& domain, CompletionReport* report = nullptr);

}  // namespace hodomap
