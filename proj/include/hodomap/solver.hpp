#pragma once

#include "hodomap/geometry.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hodomap {

/// Logarithmic charge contributing coeff * Log(z - at) to the holomorphic
/// potential. `cut` is the unit direction of the branch-cut ray from `at`.
struct LogCharge {
  Point at;
  Complex coeff;
  Point cut{1.0, 0.0};
};

/// Harmonic function u = Im F + shift with F = P(z) + sum coeff_k Log_k(z - z_k).
///
/// Closed forms are the charge-free case (P a complex polynomial); the MFS
/// solution uses purely imaginary coefficients so that Im F = sum c_k log|z - z_k|.
/// The conjugate of any instance is again of this form (see analytic).
class HarmonicFunction {
 public:
  enum class Kind { ClosedForm, ChargeExpansion };

  static HarmonicFunction closed_form(std::string name, std::vector<Complex> poly);
  /// Named closed forms: "y", "x", "im_z2", "re_z2", "im_z3", "re_z3", "zero".
  static HarmonicFunction named(const std::string& name);
  /// sum c_k log|z - z_k| + constant.
  static HarmonicFunction charge_expansion(std::vector<Point> points, std::vector<double> coeffs,
                                           double constant, double min_offset);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  double value(Point z) const;
  Point gradient(Point z) const;  ///< (u_x, u_y)
  Complex derivative(Point z) const;         ///< F'
  Complex second_derivative(Point z) const;  ///< F''
  /// F on the current branch choice (no shift).
  Complex potential(Point z) const;

  const std::vector<Complex>& polynomial() const { return poly_; }
  const std::vector<LogCharge>& charges() const { return charges_; }
  double shift() const { return shift_; }
  double min_offset() const { return min_offset_; }
  bool path_integrated() const { return static_cast<bool>(value_override_); }

  /// Im(i F) + shift', i.e. Re F: a harmonic conjugate up to an additive constant.
  HarmonicFunction rotated(std::string name) const;
  HarmonicFunction with_shift(double shift) const;
  HarmonicFunction with_cuts(const std::vector<Point>& cuts) const;
  /// Replace value evaluation (used when no global branch choice exists).
  HarmonicFunction with_value_override(std::function<double(Point)> value) const;
  /// Linear combination a*this + b*other; both must share charge locations.
  HarmonicFunction combined(double a, const HarmonicFunction& other, double b) const;

 private:
  Kind kind_ = Kind::ClosedForm;
  std::string name_;
  std::vector<Complex> poly_;
  std::vector<LogCharge> charges_;
  double shift_ = 0;
  double min_offset_ = 0;
  std::function<double(Point)> value_override_;
};

/// Branch-cut logarithm: log|w| + i*theta with the discontinuity on the ray
/// along `cut`. theta differs from the principal argument by a constant.
Complex cut_log(Complex w, Point cut);

/// Raised-cosine bump in arc length: 0 at start/end, `height` at peak.
struct Bump {
  double start = 0, peak = 0, end = 0, height = 1;
  double operator()(double s) const;
};

/// Boundary data as a sum of bumps on the free part of the boundary.
struct BoundaryData {
  std::vector<Bump> bumps;
  double boundary_length = 0;

  double operator()(double s) const;
  double max_value() const;
  double min_value() const;
  /// Nonnegative, zero off the support, monotone up to the peak and down after
  /// (checked on `n` samples of the boundary).
  bool is_unimodal(std::size_t n = 512) const;
};

/// Single bump with peak value 1 on [s0, s1] in arc length. The support must lie
/// strictly inside the free part of the boundary.
BoundaryData unimodal_data(const Domain& domain, double s0, double s1, double peak);
/// Sum of bumps with arbitrary signs/heights (each strictly inside the free part).
BoundaryData bump_data(const Domain& domain, std::vector<Bump> bumps);

struct SolverConfig {
  std::size_t charges = 96;
  std::size_t collocation = 0;  ///< 0 selects 3 * charges
  double offset = 0.6;
  double target = 1e-8;
  double truncation = 1e-12;
  double rank_slack = 2.0;  ///< accepted residual growth when trimming the rank
  double grading = 0.5;     ///< > 0: offset shrinks to grading * distance near singular points
};

/// Trace on the boundary given the point and its arc-length coordinate.
using BoundaryTrace = std::function<double(Point z, double s)>;

struct SolveReport {
  std::size_t charges = 0, collocation = 0, validation = 0, rank = 0;
  double offset = 0;
  double residual = 0;           ///< max |h - trace| over validation points
  double collocation_residual = 0;
  double condition = 0;          ///< sigma_max / sigma_min over retained values
  bool warning = false;          ///< residual above target
};

struct Solution {
  HarmonicFunction function;
  SolveReport report;
};

Solution solve_dirichlet(const Domain& domain, const BoundaryTrace& trace,
                         const SolverConfig& config);
Solution solve_dirichlet(const Domain& domain, const BoundaryData& data, const SolverConfig& config);
/// Harmonic extension of a closed form's own trace.
Solution solve_dirichlet(const Domain& domain, const HarmonicFunction& closed_form,
                         const SolverConfig& config);

/// Charge locations used for a given domain and configuration.
std::vector<Point> charge_layout(const Domain& domain, const SolverConfig& config);

/// Largest deviation between analytic gradient and central differences with
/// step h at the given points.
double gradient_fd_error(const HarmonicFunction& h, const std::vector<Point>& points,
                         double step = 1e-5);
/// Largest 5-point Laplacian at the given points.
double laplacian_fd(const HarmonicFunction& h, const std::vector<Point>& points,
                    double step = 1e-4);

}  // namespace hodomap
