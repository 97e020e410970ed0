#include "hodomap/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace hodomap {

// ---------------------------------------------------------------------------
// HarmonicFunction

Complex cut_log(Complex w, Point cut) {
  // arg measured from the direction opposite the cut, so the jump sits on the cut ray
  return {std::log(std::abs(w)), std::arg(w * std::conj(-cut))};
}

HarmonicFunction HarmonicFunction::closed_form(std::string name, std::vector<Complex> poly) {
  HarmonicFunction h;
  h.kind_ = Kind::ClosedForm;
  h.name_ = std::move(name);
  h.poly_ = std::move(poly);
  return h;
}

HarmonicFunction HarmonicFunction::named(const std::string& name) {
  static const std::map<std::string, std::vector<Complex>> table{
      {"zero", {}},
      {"y", {0.0, 1.0}},
      {"x", {0.0, Complex(0, 1)}},
      {"im_z2", {0.0, 0.0, 1.0}},
      {"re_z2", {0.0, 0.0, Complex(0, 1)}},
      {"im_z3", {0.0, 0.0, 0.0, 1.0}},
      {"re_z3", {0.0, 0.0, 0.0, Complex(0, 1)}},
  };
  auto it = table.find(name);
  if (it == table.end()) throw Error("solver", "unknown closed form '" + name + "'");
  return closed_form(name, it->second);
}

HarmonicFunction HarmonicFunction::charge_expansion(std::vector<Point> points,
                                                    std::vector<double> coeffs, double constant,
                                                    double min_offset) {
  if (points.size() != coeffs.size()) throw Error("solver", "charge/coefficient count mismatch");
  HarmonicFunction h;
  h.kind_ = Kind::ChargeExpansion;
  h.name_ = "charges";
  h.poly_ = {Complex(0, constant)};
  for (std::size_t k = 0; k < points.size(); ++k)
    h.charges_.push_back({points[k], Complex(0, coeffs[k]), Point(1, 0)});
  h.min_offset_ = min_offset;
  return h;
}

Complex HarmonicFunction::potential(Point z) const {
  Complex f = 0;
  for (std::size_t j = poly_.size(); j-- > 0;) f = f * z + poly_[j];
  for (const auto& c : charges_) {
    Complex w = z - c.at;
    if (w == Complex(0)) throw Error("solver", "evaluation at a charge point");
    f += c.coeff * cut_log(w, c.cut);
  }
  return f;
}

double HarmonicFunction::value(Point z) const {
  if (value_override_) return value_override_(z);
  if (kind_ == Kind::ClosedForm) return potential(z).imag() + shift_;
  // Im(i c Log w) = c log|w|: branch free, evaluate directly
  Complex p = 0;
  for (std::size_t j = poly_.size(); j-- > 0;) p = p * z + poly_[j];
  double sum = p.imag();
  for (const auto& c : charges_) {
    Complex w = z - c.at;
    if (w == Complex(0)) throw Error("solver", "evaluation at a charge point");
    if (c.coeff.imag() != 0) sum += c.coeff.imag() * 0.5 * std::log(std::norm(w));
    if (c.coeff.real() != 0) sum += c.coeff.real() * std::arg(w * std::conj(-c.cut));
  }
  return sum + shift_;
}

Complex HarmonicFunction::derivative(Point z) const {
  Complex d = 0;
  for (std::size_t j = poly_.size(); j-- > 1;) d = d * z + static_cast<double>(j) * poly_[j];
  for (const auto& c : charges_) {
    Complex w = z - c.at;
    if (w == Complex(0)) throw Error("solver", "evaluation at a charge point");
    d += c.coeff / w;
  }
  return d;
}

Complex HarmonicFunction::second_derivative(Point z) const {
  Complex d = 0;
  for (std::size_t j = poly_.size(); j-- > 2;)
    d = d * z + static_cast<double>(j * (j - 1)) * poly_[j];
  for (const auto& c : charges_) {
    Complex w = z - c.at;
    if (w == Complex(0)) throw Error("solver", "evaluation at a charge point");
    d -= c.coeff / (w * w);
  }
  return d;
}

Point HarmonicFunction::gradient(Point z) const {
  Complex d = derivative(z);
  return {d.imag(), d.real()};
}

HarmonicFunction HarmonicFunction::rotated(std::string name) const {
  HarmonicFunction h = *this;
  h.name_ = std::move(name);
  for (auto& a : h.poly_) a *= Complex(0, 1);
  for (auto& c : h.charges_) c.coeff *= Complex(0, 1);
  h.shift_ = 0;
  h.value_override_ = nullptr;
  return h;
}

HarmonicFunction HarmonicFunction::with_shift(double shift) const {
  HarmonicFunction h = *this;
  h.shift_ = shift;
  return h;
}

HarmonicFunction HarmonicFunction::with_cuts(const std::vector<Point>& cuts) const {
  if (cuts.size() != charges_.size()) throw Error("solver", "one cut direction per charge");
  HarmonicFunction h = *this;
  for (std::size_t k = 0; k < cuts.size(); ++k) h.charges_[k].cut = cuts[k] / std::abs(cuts[k]);
  return h;
}

HarmonicFunction HarmonicFunction::with_value_override(std::function<double(Point)> value) const {
  HarmonicFunction h = *this;
  h.value_override_ = std::move(value);
  return h;
}

HarmonicFunction HarmonicFunction::combined(double a, const HarmonicFunction& other,
                                            double b) const {
  if (charges_.size() != other.charges_.size())
    throw Error("solver", "combination needs matching charge layouts");
  HarmonicFunction h = *this;
  h.poly_.resize(std::max(poly_.size(), other.poly_.size()), 0.0);
  for (auto& p : h.poly_) p *= a;
  for (std::size_t j = 0; j < other.poly_.size(); ++j) h.poly_[j] += b * other.poly_[j];
  for (std::size_t k = 0; k < charges_.size(); ++k) {
    if (std::abs(charges_[k].at - other.charges_[k].at) > 1e-14)
      throw Error("solver", "combination needs matching charge layouts");
    h.charges_[k].coeff = a * charges_[k].coeff + b * other.charges_[k].coeff;
  }
  h.shift_ = a * shift_ + b * other.shift_;
  h.value_override_ = nullptr;
  return h;
}

// ---------------------------------------------------------------------------
// Boundary data

double Bump::operator()(double s) const {
  if (s <= start || s >= end) return 0.0;
  if (s <= peak) return 0.5 * height * (1 - std::cos(kPi * (s - start) / (peak - start)));
  return 0.5 * height * (1 + std::cos(kPi * (s - peak) / (end - peak)));
}

double BoundaryData::operator()(double s) const {
  double sum = 0;
  for (const auto& b : bumps) sum += b(s);
  return sum;
}

double BoundaryData::max_value() const {
  double m = 0;
  for (std::size_t i = 0; i < 4096; ++i) m = std::max(m, (*this)(boundary_length * i / 4096));
  for (const auto& b : bumps) m = std::max(m, (*this)(b.peak));
  return m;
}

double BoundaryData::min_value() const {
  double m = 0;
  for (std::size_t i = 0; i < 4096; ++i) m = std::min(m, (*this)(boundary_length * i / 4096));
  for (const auto& b : bumps) m = std::min(m, (*this)(b.peak));
  return m;
}

bool BoundaryData::is_unimodal(std::size_t n) const {
  if (bumps.size() != 1) return false;
  const Bump& b = bumps.front();
  if (!(b.height > 0)) return false;
  double prev = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = boundary_length * static_cast<double>(i) / static_cast<double>(n - 1);
    double v = (*this)(s);
    if (v < 0) return false;
    if ((s <= b.start || s >= b.end) && v != 0) return false;
    if (s > b.start && s <= b.peak && v < prev) return false;
    if (s > b.peak && s < b.end && v > prev) return false;
    prev = v;
  }
  return true;
}

BoundaryData bump_data(const Domain& domain, std::vector<Bump> bumps) {
  const auto& curve = domain.boundary();
  for (const auto& b : bumps) {
    if (!(b.start < b.peak && b.peak < b.end))
      throw Error("solver", "bump peak must lie strictly inside its support");
    if (!(b.start > curve.nodal_length() && b.end < curve.length()))
      throw Error("solver", "bump support must lie strictly inside the free boundary");
    if (!std::isfinite(b.height)) throw Error("solver", "bump height must be finite");
  }
  return {std::move(bumps), curve.length()};
}

BoundaryData unimodal_data(const Domain& domain, double s0, double s1, double peak) {
  return bump_data(domain, {Bump{s0, peak, s1, 1.0}});
}

// ---------------------------------------------------------------------------
// MFS

namespace {

/// Arc-length positions distributed with doubled density within 0.1 of corners.
class GradedSampler {
 public:
  GradedSampler(const BoundaryCurve& curve, const std::vector<Point>& singular, double grading)
      : L_(curve.length()) {
    std::vector<Point> corners;
    for (const auto& k : curve.knots())
      if (k.is_corner()) corners.push_back(k.point);
    constexpr std::size_t K = 8192;
    s_.resize(K + 1);
    w_.assign(K + 1, 0.0);
    for (std::size_t i = 0; i <= K; ++i) s_[i] = L_ * static_cast<double>(i) / K;
    for (std::size_t i = 0; i < K; ++i) {
      Point p = curve.point_at(0.5 * (s_[i] + s_[i + 1]));
      double density = 1;
      for (Point c : corners)
        if (std::abs(p - c) < 0.1) density = 2;
      if (grading > 0)
        for (Point c : singular) density = std::max(density, std::min(8.0, 0.05 / std::abs(p - c)));
      w_[i + 1] = w_[i] + density * (s_[i + 1] - s_[i]);
    }
  }

  std::vector<double> positions(std::size_t n, double phase) const {
    std::vector<double> out;
    const double total = w_.back();
    for (std::size_t j = 0; j < n; ++j) {
      double target = total * (static_cast<double>(j) + phase) / static_cast<double>(n);
      auto it = std::lower_bound(w_.begin(), w_.end(), target);
      std::size_t i = std::clamp<std::size_t>(static_cast<std::size_t>(it - w_.begin()), 1, w_.size() - 1);
      double f = (target - w_[i - 1]) / (w_[i] - w_[i - 1]);
      out.push_back(s_[i - 1] + f * (s_[i] - s_[i - 1]));
    }
    return out;
  }

 private:
  double L_;
  std::vector<double> s_, w_;
};

Point nearest_on_polyline(const std::vector<Point>& poly, Point z) {
  double best = 1e300;
  Point arg;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    Point a = poly[i], b = poly[(i + 1) % poly.size()];
    Point ab = b - a;
    double t = std::clamp(dot(z - a, ab) / std::norm(ab), 0.0, 1.0);
    Point q = a + t * ab;
    if (std::abs(z - q) < best) best = std::abs(z - q), arg = q;
  }
  return arg;
}

/// Boundary points where the solution loses smoothness: reentrant corners and
/// the anchor of a DMO graph.
std::vector<Point> singular_points(const Domain& domain) {
  std::vector<Point> out;
  for (const auto& k : domain.boundary().knots())
    if (k.is_corner() && k.interior_angle() > 0.75 * kPi) out.push_back(k.point);
  if (domain.smoothness() == Smoothness::C1DMO) out.push_back(domain.anchor());
  return out;
}

double local_offset(const SolverConfig& config, const std::vector<Point>& singular, Point p) {
  if (config.grading <= 0) return config.offset;
  double d = 1e300;
  for (Point c : singular) d = std::min(d, std::abs(p - c));
  return std::clamp(config.grading * d, 0.05 * config.offset, config.offset);
}

}  // namespace

std::vector<Point> charge_layout(const Domain& domain, const SolverConfig& config) {
  if (config.charges < 4) throw Error("solver", "need at least 4 charges");
  if (!(config.offset > 0)) throw Error("solver", "charge offset must be positive");
  const auto& curve = domain.boundary();
  const auto singular = singular_points(domain);
  GradedSampler sampler(curve, singular, config.grading);
  std::vector<Point> out;
  for (double s : sampler.positions(config.charges, 0.5)) {
    Point p = curve.point_at(s);
    const double delta = local_offset(config, singular, p);
    Point z = p + delta * curve.normal_at(s);
    // near reentrant or sharp corners the normal offset can land too close
    for (int iter = 0; iter < 64; ++iter) {
      bool in = domain.inside(z);
      double d = domain.distance_to_boundary(z);
      if (!in && d >= 0.5 * delta) break;
      Point q = nearest_on_polyline(domain.polyline(), z);
      Point dir = in ? q - z : z - q;
      if (std::abs(dir) < 1e-14) dir = curve.normal_at(s);
      z = (in ? q : z) + 0.25 * delta * dir / std::abs(dir);
    }
    if (domain.inside(z) || domain.distance_to_boundary(z) < 0.5 * delta)
      throw Error("solver", "could not place a charge outside the domain");
    out.push_back(z);
  }
  return out;
}

Solution solve_dirichlet(const Domain& domain, const BoundaryTrace& trace,
                         const SolverConfig& config) {
  const std::size_t N = config.charges;
  const std::size_t M = config.collocation ? config.collocation : 3 * N;
  if (M < 2 * N) throw Error("solver", "collocation count must be at least twice the charge count");
  const auto& curve = domain.boundary();
  GradedSampler sampler(curve, singular_points(domain), config.grading);
  std::vector<Point> charges = charge_layout(domain, config);

  std::vector<double> colloc_s = sampler.positions(M, 0.5);
  Eigen::MatrixXd A(M, N + 1);
  Eigen::VectorXd rhs(M);
  for (std::size_t i = 0; i < M; ++i) {
    Point x = curve.point_at(colloc_s[i]);
    for (std::size_t k = 0; k < N; ++k) A(i, k) = std::log(std::abs(x - charges[k]));
    A(i, N) = 1.0;
    rhs(i) = trace(x, colloc_s[i]);
    if (!std::isfinite(rhs(i))) throw Error("solver", "boundary trace is not finite");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(config.truncation);
  const auto& sv = svd.singularValues();
  std::size_t rank = static_cast<std::size_t>(svd.rank());
  SolveReport rep;
  rep.charges = N;
  rep.collocation = M;
  rep.rank = rank;
  rep.offset = config.offset;
  rep.condition = rank > 0 ? sv(0) / sv(static_cast<Eigen::Index>(rank) - 1) : INFINITY;
  if (rank * 10 < N + 1) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "least-squares system numerically rank deficient (rank %zu of %zu, condition %.3e)",
                  rank, N + 1, sv(0) / std::max(sv(sv.size() - 1), 1e-300));
    throw Error("solver", buf);
  }
  // Discrepancy-style rank choice: the smallest truncation whose collocation
  // residual is within a factor of the best one. Extra singular directions
  // beyond that point only inflate the coefficients (and the cancellation
  // error in every later evaluation) without improving the fit.
  const auto& U = svd.matrixU();
  const auto& Vmat = svd.matrixV();
  Eigen::VectorXd proj = U.leftCols(static_cast<Eigen::Index>(rank)).transpose() * rhs;
  std::vector<double> res_by_rank(rank + 1);
  {
    Eigen::VectorXd r = rhs;
    res_by_rank[0] = r.cwiseAbs().maxCoeff();
    for (std::size_t i = 0; i < rank; ++i) {
      r -= proj(static_cast<Eigen::Index>(i)) * U.col(static_cast<Eigen::Index>(i));
      res_by_rank[i + 1] = r.cwiseAbs().maxCoeff();
    }
  }
  double best = *std::min_element(res_by_rank.begin(), res_by_rank.end());
  std::size_t used = rank;
  for (std::size_t k = 1; k <= rank; ++k)
    if (res_by_rank[k] <= config.rank_slack * best) {
      used = k;
      break;
    }
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(N + 1));
  for (std::size_t i = 0; i < used; ++i)
    coef += (proj(static_cast<Eigen::Index>(i)) / sv(static_cast<Eigen::Index>(i))) *
            Vmat.col(static_cast<Eigen::Index>(i));
  rep.rank = used;
  rep.condition = sv(0) / sv(static_cast<Eigen::Index>(used) - 1);
  rep.collocation_residual = (A * coef - rhs).cwiseAbs().maxCoeff();

  std::vector<double> c(coef.data(), coef.data() + N);
  double dmin = 1e300;
  for (Point z : charges) dmin = std::min(dmin, domain.distance_to_boundary(z));
  HarmonicFunction h = HarmonicFunction::charge_expansion(charges, c, coef(N), dmin);

  // validation points are a finer, phase-shifted family distinct from collocation
  const std::size_t V = 3 * M + 7;
  rep.validation = V;
  double residual = 0;
  for (double s : sampler.positions(V, 0.5)) {
    Point x = curve.point_at(s);
    residual = std::max(residual, std::abs(h.value(x) - trace(x, s)));
  }
  rep.residual = residual;
  rep.warning = residual > config.target;
  return {std::move(h), rep};
}

Solution solve_dirichlet(const Domain& domain, const BoundaryData& data, const SolverConfig& config) {
  return solve_dirichlet(domain, [&](Point, double s) { return data(s); }, config);
}

Solution solve_dirichlet(const Domain& domain, const HarmonicFunction& closed_form,
                         const SolverConfig& config) {
  return solve_dirichlet(domain, [&](Point z, double) { return closed_form.value(z); }, config);
}

double gradient_fd_error(const HarmonicFunction& h, const std::vector<Point>& points, double step) {
  double worst = 0;
  for (Point z : points) {
    Point g = h.gradient(z);
    double gx = (h.value(z + Point(step, 0)) - h.value(z - Point(step, 0))) / (2 * step);
    double gy = (h.value(z + Point(0, step)) - h.value(z - Point(0, step))) / (2 * step);
    worst = std::max({worst, std::abs(g.real() - gx), std::abs(g.imag() - gy)});
  }
  return worst;
}

double laplacian_fd(const HarmonicFunction& h, const std::vector<Point>& points, double step) {
  double worst = 0;
  for (Point z : points) {
    double lap = h.value(z + Point(step, 0)) + h.value(z - Point(step, 0)) +
                 h.value(z + Point(0, step)) + h.value(z - Point(0, step)) - 4 * h.value(z);
    worst = std::max(worst, std::abs(lap) / (step * step));
  }
  return worst;
}

}  // namespace hodomap
