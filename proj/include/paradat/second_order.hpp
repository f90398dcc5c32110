#pragma once

#include <map>
#include <string>
#include <vector>

#include "paradat/assembly.hpp"
#include "paradat/pcg.hpp"

namespace paradat {

/// One test space Y^δ_L with everything the dual-norm evaluation needs.
struct TestBundle {
  KroneckerOp B;
  RieszInverse KY;
  std::vector<double> g;
};

struct SecondOrderOptions {
  int ell = 0;                          // test refinement level of the solve
  std::vector<int> estimator_levels{};  // extra levels kept for estimate()
  HeatCoefficients coeffs;
};

/// The Schur complement system  G_ε = Bᵀ K_Y B + M_Γω + ε² M_γ0  of the
/// second-order formulation, with the estimator bundles needed to evaluate
/// the a posteriori functional on (possibly finer) test spaces.
struct SecondOrderSystem {
  TensorSpaces spaces;
  ProblemData data;
  int ell = 0;
  double eps = 0.0;

  KroneckerOp M_obs;     // M_Γω
  KroneckerOp M_trace;   // M_γ0
  RieszInverse KX;
  std::vector<double> f;  // f(Φ^X|_{I×ω})
  double f_norm2 = 0.0;
  std::map<int, TestBundle> bundles;  // solve level and estimator levels

  int dim() const { return spaces.x_dim(); }
  const TestBundle& bundle(int level) const;
  int max_level() const { return bundles.rbegin()->first; }
};

SecondOrderSystem build_second_order(const TensorGrid& grid, const ProblemData& data,
                                     const SecondOrderOptions& opts = {});

/// y = (Bᵀ K_Y B + M_Γω + ε² M_γ0) u without materializing the product.
void schur_apply(const SecondOrderSystem& sys, const std::vector<double>& u,
                 std::vector<double>& y);

/// G̃_ε̃^δ(u) evaluated on Y^δ_L: ⟨K_Y r, r⟩ + ⟨M_Γω u,u⟩ − 2⟨u,f⟩ + ‖f‖²
/// + ε̃²⟨M_γ0 u,u⟩ with r = g − B u. Clamped at zero.
double estimate(const SecondOrderSystem& sys, const std::vector<double>& u, double eps_tilde,
                int level);

struct StopEvent {
  int iter;
  double r_dot_Kr;
  double estimator0;
};

struct SolveConfig {
  PcgConfig pcg;
  double stop_mu = 1.0;   // μ in ⟨r, K_X r⟩ ≤ μ ε² G̃_0(ũ); the paper takes 1
  int report_level = -1;  // estimator level for the report; -1 = finest kept
  int probe_stride = 1;   // evaluate the coupled stop rule every k-th iteration
};

struct SolveReport {
  std::vector<double> u;
  std::vector<double> mu;  // K_Y (g − B u) on the solve level
  double estimator0 = 0.0;      // G̃_0 at the report level
  double estimator_eps = 0.0;   // G̃_ε at the report level
  int report_level = 0;
  int iterations = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> residual_history;
  SpectralEstimate spectral;
  std::vector<StopEvent> stop_transcript;
};

SolveReport solve(const SecondOrderSystem& sys, const SolveConfig& cfg);

/// ‖u_h(t) − u(t)‖_{L2(Ω)} for each requested time.
std::vector<double> time_slice_errors(const TensorSpaces& spaces, const std::vector<double>& u,
                                      const ManufacturedSolution& exact,
                                      const std::vector<double>& times);
std::vector<double> time_slice_errors(const SecondOrderSystem& sys, const std::vector<double>& u,
                                      const ManufacturedSolution& exact,
                                      const std::vector<double>& times);

/// √⟨G_ε v, v⟩, the energy norm of the Schur operator (oracle comparisons).
double energy_norm(const SecondOrderSystem& sys, const std::vector<double>& v);

/// Nodal interpolant of a smooth function onto X^δ.
std::vector<double> interpolate_x(const TensorSpaces& spaces,
                                  const std::function<double(double, double)>& fn);

}  // namespace paradat
