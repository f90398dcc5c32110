#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "paradat/interval.hpp"

namespace paradat {

/// Smooth reference state u(t,x) with the derivatives needed for consistent
/// forcing g = ∂t u - ∂xx u and for exact-solution comparisons.
struct ManufacturedSolution {
  std::string name;
  std::function<double(double, double)> u;
  std::function<double(double, double)> du_dt;
  std::function<double(double, double)> du_dx;
  std::function<double(double, double)> d2u_dx2;
};

/// Registry: "t3sin" is (t^3+1) sin(pi x); "poly" is (1+t) x (1-x).
const ManufacturedSolution& manufactured(const std::string& id);

/// Input data of one assimilation run: observations f = u|_{I x omega} plus
/// the perturbation lambda*1 on I x omega, forcing g consistent with u.
/// Alternatively the assembled vectors can be supplied directly; raw data is
/// tied to one test space, so systems built from it keep the estimator on
/// the solve level.
struct RawData {
  std::vector<double> g;  // moments on the solve-level test space
  std::vector<double> f;  // moments on the trial space, window applied
  double f_norm2 = 0.0;
};

struct ProblemData {
  ManufacturedSolution solution;
  double lambda = 0.0;  // inconsistency: f <- f + lambda * 1
  ObservationWindow window;
  double eps = 0.0;  // regularization weight on the t=0 trace
  std::optional<RawData> raw;

  ProblemData() : solution(manufactured("t3sin")) {}
};

/// Constant coefficients of the parabolic operator; the experiments use the
/// plain heat equation (b = c = 0).
struct HeatCoefficients {
  double b = 0.0;
  double c = 0.0;
};

}  // namespace paradat
