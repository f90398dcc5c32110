#pragma once

#include <vector>

namespace paradat {

/// Gauss-Legendre rule on the reference cell [0, 1].
struct QuadRule {
  std::vector<double> points;
  std::vector<double> weights;  // sum to 1 (reference cell has length 1)
  int exactness = 0;            // exact for polynomials up to this degree
};

/// n-point Gauss-Legendre rule on [0, 1]; exactness 2n - 1.
const QuadRule& gauss_rule(int npoints);

/// Smallest Gauss rule integrating polynomials of the given degree exactly.
const QuadRule& rule_for_exactness(int degree);

}  // namespace paradat
