#pragma once

#include <functional>
#include <string>
#include <vector>

namespace paradat {

/// Matrix-free symmetric operator: y = A x.
using LinearOperator = std::function<void(const std::vector<double>&, std::vector<double>&)>;

enum class StopRule { FixedTol, EstimatorCoupled };

struct PcgConfig {
  int max_iters = 10000;
  StopRule stop_rule = StopRule::FixedTol;
  double tol = 1e-10;  // fixed_tol: stop when <r,Kr> <= tol^2 * <r0,Kr0>
  bool record_lanczos = false;
};

struct SpectralEstimate {
  double lambda_min_est = 0.0;
  double lambda_max_est = 0.0;
  double cond_est = 0.0;
};

struct PcgResult {
  std::vector<double> x;
  int iters = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> residual_history;  // <r,Kr> after each iteration (0th = initial)
  SpectralEstimate spectral;
};

/// Preconditioned conjugate gradients for A symmetric positive (semi)definite
/// and K symmetric positive definite, starting from x = 0.
///
/// `stop_probe(x, rKr)` is consulted each iteration under the
/// EstimatorCoupled rule and returns true to stop. With record_lanczos the
/// eigenvalues of the CG tridiagonal are returned as Ritz estimates of
/// spec(K A).
PcgResult pcg(const LinearOperator& A, const LinearOperator& K, const std::vector<double>& b,
              const PcgConfig& cfg,
              const std::function<bool(const std::vector<double>&, double)>& stop_probe = {});

}  // namespace paradat
