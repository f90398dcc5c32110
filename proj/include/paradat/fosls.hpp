#pragma once

#include <map>
#include <string>
#include <vector>

#include "paradat/assembly.hpp"
#include "paradat/pcg.hpp"
#include "paradat/second_order.hpp"

namespace paradat {

struct FoslsTestBundle {
  KroneckerOp C_u;
  KroneckerOp C_p;
  RieszInverse KY;
  std::vector<double> g;  // ḡ on Ȳ_L
};

struct FoslsOptions {
  int ell = 0;
  std::vector<int> estimator_levels{};
  HeatCoefficients coeffs;
  bool ybar_reduced_time_degree = false;  // degree-(q-1) time factor variant
};

/// The 2x2-block Schur system of the FOSLS formulation,
///   [ L + M_Γω + ε²M_γ0 + C_uᵀK_Y C_u     C_uᵀK_Y C_p − J  ] [u]   [f_ω + C_uᵀK_Y ḡ]
///   [ C_pᵀK_Y C_u − Jᵀ                    N + C_pᵀK_Y C_p  ] [p] = [C_pᵀK_Y ḡ      ]
/// preconditioned by diag(K_X, K_Z). Vectors are stored as [u; p].
struct FoslsSystem {
  TensorSpaces spaces;
  ProblemData data;
  int ell = 0;
  double eps = 0.0;

  KroneckerOp J, L, N;
  KroneckerOp M_obs, M_trace;
  RieszInverse KX, KZ;
  std::vector<double> f;
  double f_norm2 = 0.0;
  std::map<int, FoslsTestBundle> bundles;

  int u_dim() const { return spaces.x_dim(); }
  int p_dim() const { return spaces.z_dim(); }
  int dim() const { return u_dim() + p_dim(); }
  const FoslsTestBundle& bundle(int level) const;
  int max_level() const { return bundles.rbegin()->first; }
};

FoslsSystem build_fosls(const TensorGrid& grid, const ProblemData& data,
                        const FoslsOptions& opts = {});

/// Block application of the Schur operator on the stacked vector [u; p].
void fosls_schur_apply(const FoslsSystem& sys, const std::vector<double>& up,
                       std::vector<double>& y);

/// H̃_ε̃^δ(u, p) on Ȳ_L: ⟨K_Y r, r⟩ + (⟨Np,p⟩ − 2 uᵀJp + ⟨Lu,u⟩)
/// + ⟨M_Γω u,u⟩ − 2⟨u,f⟩ + ‖f‖² + ε̃²⟨M_γ0 u,u⟩, r = ḡ − C_u u − C_p p.
double fosls_estimate(const FoslsSystem& sys, const std::vector<double>& up, double eps_tilde,
                      int level);

struct FoslsReport {
  std::vector<double> u;
  std::vector<double> p;
  std::vector<double> lambda;  // K_Y (ḡ − C_u u − C_p p)
  double estimator0 = 0.0;
  double estimator_eps = 0.0;
  int report_level = 0;
  int iterations = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> residual_history;
  SpectralEstimate spectral;
  std::vector<StopEvent> stop_transcript;
};

FoslsReport fosls_solve(const FoslsSystem& sys, const SolveConfig& cfg);

double fosls_energy_norm(const FoslsSystem& sys, const std::vector<double>& up);

}  // namespace paradat
