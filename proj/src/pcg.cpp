#include "paradat/pcg.hpp"

#include <cmath>
#include <stdexcept>

#include "paradat/linalg.hpp"

namespace paradat {

PcgResult pcg(const LinearOperator& A, const LinearOperator& K, const std::vector<double>& b,
              const PcgConfig& cfg,
              const std::function<bool(const std::vector<double>&, double)>& stop_probe) {
  if (cfg.max_iters < 1) throw std::invalid_argument("pcg: max_iters >= 1 required");
  if (cfg.stop_rule == StopRule::FixedTol && !(cfg.tol > 0.0))
    throw std::invalid_argument("pcg: fixed_tol requires tol > 0");

  const size_t n = b.size();
  PcgResult res;
  res.x.assign(n, 0.0);

  std::vector<double> r = b;
  std::vector<double> z(n), p(n), Ap(n);
  K(r, z);
  double rz = dot(r, z);
  res.residual_history.push_back(rz);
  if (!(rz >= 0.0) || !std::isfinite(rz)) {
    res.reason = "breakdown: preconditioned residual not positive";
    return res;
  }
  const double rz0 = rz;
  if (rz0 == 0.0) {
    res.converged = true;
    res.reason = "zero right-hand side";
    return res;
  }
  p = z;

  std::vector<double> alphas, betas;

  for (int it = 0; it < cfg.max_iters; ++it) {
    A(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0) || !std::isfinite(pAp)) {
      res.reason = "breakdown: non-positive curvature";
      res.iters = it;
      return res;
    }
    const double alpha = rz / pAp;
    axpy(alpha, p, res.x);
    axpy(-alpha, Ap, r);
    K(r, z);
    const double rz_new = dot(r, z);
    if (!std::isfinite(rz_new)) {
      res.reason = "breakdown: NaN residual";
      res.iters = it + 1;
      return res;
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    res.residual_history.push_back(rz);
    res.iters = it + 1;

    if (cfg.record_lanczos) {
      alphas.push_back(alpha);
      betas.push_back(beta);
    }

    bool stop = false;
    if (cfg.stop_rule == StopRule::FixedTol) {
      stop = rz <= cfg.tol * cfg.tol * rz0;
    } else {
      if (!stop_probe) throw std::invalid_argument("pcg: estimator-coupled rule needs a probe");
      stop = stop_probe(res.x, rz);
    }
    if (stop) {
      res.converged = true;
      res.reason = "stop rule satisfied";
      break;
    }
    for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  if (!res.converged) res.reason = "max_iters exceeded";

  if (cfg.record_lanczos && !alphas.empty()) {
    // CG coefficients define the Lanczos tridiagonal of K·A; its eigenvalues
    // are interior Ritz estimates of the preconditioned spectrum.
    const size_t k = alphas.size();
    std::vector<double> diag(k), off(k > 1 ? k - 1 : 0);
    for (size_t j = 0; j < k; ++j) {
      diag[j] = 1.0 / alphas[j];
      if (j > 0) diag[j] += betas[j - 1] / alphas[j - 1];
      if (j + 1 < k) off[j] = std::sqrt(betas[j]) / alphas[j];
    }
    const std::vector<double> ritz = tridiag_eigenvalues(diag, off);
    res.spectral.lambda_min_est = ritz.front();
    res.spectral.lambda_max_est = ritz.back();
    if (ritz.front() > 0.0) res.spectral.cond_est = ritz.back() / ritz.front();
  }
  return res;
}

}  // namespace paradat
