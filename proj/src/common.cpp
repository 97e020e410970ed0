#include "hodomap/common.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace hodomap {

Point QuasiRandom2D::next() {
  // plastic-number based additive recurrence
  constexpr double g = 1.32471795724474602596;
  constexpr double a1 = 1.0 / g;
  constexpr double a2 = 1.0 / (g * g);
  ++index_;
  double n = static_cast<double>(index_ % 1000000007ULL);
  double x = std::fmod(0.5 + a1 * n, 1.0);
  double y = std::fmod(0.5 + a2 * n, 1.0);
  return {x, y};
}

namespace {

struct GaussTable {
  std::vector<double> nodes, weights;
  GaussTable() {
    using Rule = boost::math::quadrature::gauss<double, 16>;
    const auto& a = Rule::abscissa();
    const auto& w = Rule::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
      nodes.push_back(-a[i]);
      weights.push_back(w[i]);
      nodes.push_back(a[i]);
      weights.push_back(w[i]);
    }
  }
};

const GaussTable& gauss_table() {
  static const GaussTable table;
  return table;
}

}  // namespace

const std::vector<double>& GaussLegendre16::nodes() { return gauss_table().nodes; }
const std::vector<double>& GaussLegendre16::weights() { return gauss_table().weights; }

unsigned worker_count() {
  if (const char* env = std::getenv("HODOMAP_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double round15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace hodomap
