#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paradat/fosls.hpp"
#include "paradat/second_order.hpp"

namespace paradat {

enum class Formulation { SecondOrder, Fosls };
std::string to_string(Formulation f);

/// Rule mapping the mesh size h to the regularization parameter.
struct EpsRule {
  enum class Kind { PowerOfH, Fixed, Zero } kind = Kind::PowerOfH;
  double exponent = 1.0;  // eps = h^exponent
  double value = 0.0;     // Fixed
  double eval(double h) const;
  std::string describe() const;
  static EpsRule parse(const std::string& text);  // "h", "h^2", "0", or a float
};

struct SweepSpec {
  Formulation formulation = Formulation::SecondOrder;
  std::vector<int> level_exponents{3, 4, 5, 6, 7};  // h = 2^-k
  EpsRule eps_rule;
  int ell = 0;
  int estimate_level = 2;
  ObservationWindow window{0.25, 0.75};
  double lambda = 0.0;
  std::string problem_id = "t3sin";
  double stop_mu = 1.0;
  int max_iters = 20000;
};

struct SweepCell {
  Formulation formulation;
  double h = 0.0;
  int dim = 0;
  double eps = 0.0;
  int ell = 0;
  int estimate_level = 0;
  double estimator0 = 0.0;    // √G̃_0 (resp. √H̃_0)
  double estimator_eps = 0.0; // √G̃_ε
  int iters = 0;
  double cond_est = 0.0;
  std::vector<double> slice_errors;  // at the slice_times below
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;
  std::vector<double> slice_times;
  double slope = 0.0;  // least-squares log-log slope of estimator0 vs dim
};

SweepResult run_consistent_sweep(const SweepSpec& spec);

/// One solve at mesh size h = 2^-k; the engine behind sweeps and the CLI.
struct SingleRunConfig {
  Formulation formulation = Formulation::SecondOrder;
  int n = 16;
  double eps = 0.0625;
  int ell = 0;
  int estimate_level = 2;
  ObservationWindow window{0.25, 0.75};
  double lambda = 0.0;
  std::string problem_id = "t3sin";
  bool coupled_stop = true;
  double tol = 1e-10;    // fixed-tolerance fallback (and the eps = 0 path)
  double stop_mu = 1.0;
  int max_iters = 20000;
  bool record_lanczos = true;
  int probe_stride = 1;
  std::vector<double> slice_times{};
};

struct SingleRunResult {
  int dim = 0;
  double h = 0.0;
  double estimator0 = 0.0;     // √ of the a posteriori functional at L
  double estimator_eps = 0.0;
  int iters = 0;
  bool converged = false;
  std::string reason;
  SpectralEstimate spectral;
  std::vector<StopEvent> stop_transcript;
  std::vector<double> slice_errors;
};

SingleRunResult run_single(const SingleRunConfig& cfg);

struct ConditionCell {
  Formulation formulation;
  double h;
  double eps;
  int iters;
  double cond_est;
  double lambda_min;
  double lambda_max;
};
/// Lanczos condition estimates of the preconditioned Schur systems from a
/// long PCG run (residual 1e-12, no early stop).
std::vector<ConditionCell> run_condition_sweep(Formulation formulation,
                                               const std::vector<double>& eps_list,
                                               const std::vector<int>& level_exponents,
                                               int ell = 2);

struct RefinementLevel {
  double h;
  int dim;
  double estimator;   // √G̃_0 (or √H̃_0)
  double reduction;   // estimator / previous estimator (0 on the first level)
  bool post_stop;
  int iters;
};

struct RefinementTrace {
  std::vector<RefinementLevel> levels;
  bool stagnated = false;
  int stop_index = -1;       // level at which the stagnation rule fired
  double rho = 0.0;          // observed early reduction rate
  double plateau = 0.0;      // estimator after the stop (final trace value)
  std::string message;
};

/// §6.1.3 loop: refine until the estimator reduction is worse than
/// (1 + C rho)/(1 + C); rho is measured over the first two reductions.
RefinementTrace run_inconsistent_loop(const SweepSpec& spec, double stagnation_c = 1.0 / 3.0,
                                      int post_stop_levels = 1);

/// Computable surrogate for the minimal consistency error: the finest-level
/// √G̃_0 of the sweep (data oscillation ignored).
double estimate_consistency_error(const SweepSpec& spec);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// CSV with the fixed header
/// formulation,h,dim,eps,ell,L,estimator0,estimator_eps,iters,cond_est
std::string sweep_csv(const std::vector<SweepCell>& cells);
std::string condition_csv(const std::vector<ConditionCell>& cells, Formulation f, int ell);
std::string trace_csv(const RefinementTrace& trace, const SweepSpec& spec);

/// Thread cap for sweep cells; reads PARADAT_THREADS, defaults to hardware.
int sweep_thread_cap();

}  // namespace paradat
