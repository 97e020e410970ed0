#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hodomap {

using Point = std::complex<double>;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Failure of a pipeline stage. `stage` names the module that raised it so the
/// CLI can report where a run broke.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Point center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(Point z) const {
    return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
  }
  Rect dilated(double d) const { return {x0 - d, x1 + d, y0 - d, y1 + d}; }
  /// Counterclockwise corner list starting at the lower-left corner.
  std::vector<Point> corners() const { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }
};

inline Point cross_j(Point grad) { return {grad.imag(), -grad.real()}; }  // J = [[0,1],[-1,0]]

inline double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }
inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// Roberts' R2 low-discrepancy sequence on [0,1)^2. `seed` shifts the start
/// index so different seeds give disjoint, reproducible streams.
class QuasiRandom2D {
 public:
  explicit QuasiRandom2D(unsigned long long seed = 0) : index_(seed * 1000003ULL) {}
  Point next();

 private:
  unsigned long long index_;
};

/// 16-point Gauss-Legendre rule on [-1,1].
struct GaussLegendre16 {
  static const std::vector<double>& nodes();
  static const std::vector<double>& weights();
};

/// Worker count from HODOMAP_WORKERS, defaulting to hardware concurrency.
unsigned worker_count();

/// Runs body(i) for i in [0,n) over worker_count() threads. Each index is
/// visited exactly once; callers write to disjoint slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Shortest round-trip formatting restricted to 15 significant digits.
double round15(double x);

}  // namespace hodomap
