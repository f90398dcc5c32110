#include "paradat/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace paradat {

const ManufacturedSolution& manufactured(const std::string& id) {
  static const ManufacturedSolution t3sin{
      "t3sin",
      [](double t, double x) { return (t * t * t + 1.0) * std::sin(M_PI * x); },
      [](double t, double x) { return 3.0 * t * t * std::sin(M_PI * x); },
      [](double t, double x) { return M_PI * (t * t * t + 1.0) * std::cos(M_PI * x); },
      [](double t, double x) { return -M_PI * M_PI * (t * t * t + 1.0) * std::sin(M_PI * x); }};
  static const ManufacturedSolution poly{
      "poly",
      [](double t, double x) { return (1.0 + t) * x * (1.0 - x); },
      [](double, double x) { return x * (1.0 - x); },
      [](double t, double x) { return (1.0 + t) * (1.0 - 2.0 * x); },
      [](double t, double) { return -2.0 * (1.0 + t); }};
  static const ManufacturedSolution zero{
      "zero", [](double, double) { return 0.0; }, [](double, double) { return 0.0; },
      [](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
  if (id == "t3sin") return t3sin;
  if (id == "poly") return poly;
  if (id == "zero") return zero;
  throw std::invalid_argument("manufactured: unknown problem id '" + id + "'");
}

}  // namespace paradat
