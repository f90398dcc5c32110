#include "paradat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace paradat {
namespace {

// Nodes/weights on [-1,1] by Newton iteration on the Legendre polynomial.
QuadRule make_gauss(int n) {
  if (n < 1 || n > 64) throw std::invalid_argument("gauss_rule: 1 <= npoints <= 64");
  QuadRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  rule.exactness = 2 * n - 1;

  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    // map to [0,1]
    rule.points[i] = 0.5 * (1.0 - x);
    rule.points[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

std::map<int, QuadRule>& cache() {
  static std::map<int, QuadRule> c;
  return c;
}
std::mutex cache_mutex;

}  // namespace

const QuadRule& gauss_rule(int npoints) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache().find(npoints);
  if (it == cache().end()) it = cache().emplace(npoints, make_gauss(npoints)).first;
  return it->second;
}

const QuadRule& rule_for_exactness(int degree) {
  if (degree < 0) degree = 0;
  return gauss_rule(degree / 2 + 1);
}

}  // namespace paradat
