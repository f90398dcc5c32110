#include "paradat/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace paradat {

std::string to_string(Formulation f) {
  return f == Formulation::SecondOrder ? "second-order" : "fosls";
}

double EpsRule::eval(double h) const {
  switch (kind) {
    case Kind::PowerOfH: return std::pow(h, exponent);
    case Kind::Fixed: return value;
    case Kind::Zero: return 0.0;
  }
  return 0.0;
}

std::string EpsRule::describe() const {
  switch (kind) {
    case Kind::PowerOfH:
      return exponent == 1.0 ? "h" : "h^" + std::to_string(exponent);
    case Kind::Fixed: {
      std::ostringstream os;
      os << value;
      return os.str();
    }
    case Kind::Zero: return "0";
  }
  return "";
}

EpsRule EpsRule::parse(const std::string& text) {
  EpsRule rule;
  if (text == "h") {
    rule.kind = Kind::PowerOfH;
    rule.exponent = 1.0;
    return rule;
  }
  if (text.rfind("h^", 0) == 0) {
    rule.kind = Kind::PowerOfH;
    rule.exponent = std::stod(text.substr(2));
    return rule;
  }
  if (text == "0") {
    rule.kind = Kind::Zero;
    return rule;
  }
  size_t pos = 0;
  const double v = std::stod(text, &pos);
  if (pos != text.size()) throw std::invalid_argument("EpsRule: cannot parse '" + text + "'");
  if (v == 0.0) {
    rule.kind = Kind::Zero;
  } else {
    rule.kind = Kind::Fixed;
    rule.value = v;
  }
  return rule;
}

int sweep_thread_cap() {
  if (const char* env = std::getenv("PARADAT_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

SingleRunResult run_single(const SingleRunConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("run_single: n must be >= 1");
  ProblemData data;
  data.solution = manufactured(cfg.problem_id);
  data.lambda = cfg.lambda;
  data.window = cfg.window;
  data.eps = cfg.eps;

  SolveConfig scfg;
  scfg.pcg.max_iters = cfg.max_iters;
  scfg.pcg.record_lanczos = cfg.record_lanczos;
  scfg.stop_mu = cfg.stop_mu;
  scfg.report_level = cfg.estimate_level;
  scfg.probe_stride = cfg.probe_stride;
  if (cfg.coupled_stop && cfg.eps > 0.0) {
    scfg.pcg.stop_rule = StopRule::EstimatorCoupled;
  } else {
    scfg.pcg.stop_rule = StopRule::FixedTol;
    scfg.pcg.tol = cfg.tol;
  }

  const TensorGrid grid = TensorGrid::unit(cfg.n);
  SingleRunResult out;
  out.h = grid.space.h();

  if (cfg.formulation == Formulation::SecondOrder) {
    SecondOrderOptions opts;
    opts.ell = cfg.ell;
    opts.estimator_levels = {cfg.estimate_level};
    SecondOrderSystem sys = build_second_order(grid, data, opts);
    SolveReport rep = solve(sys, scfg);
    out.dim = sys.dim();
    out.estimator0 = std::sqrt(rep.estimator0);
    out.estimator_eps = std::sqrt(rep.estimator_eps);
    out.iters = rep.iterations;
    out.converged = rep.converged;
    out.reason = rep.reason;
    out.spectral = rep.spectral;
    out.stop_transcript = std::move(rep.stop_transcript);
    if (!cfg.slice_times.empty())
      out.slice_errors = time_slice_errors(sys, rep.u, data.solution, cfg.slice_times);
  } else {
    FoslsOptions opts;
    opts.ell = cfg.ell;
    opts.estimator_levels = {cfg.estimate_level};
    FoslsSystem sys = build_fosls(grid, data, opts);
    FoslsReport rep = fosls_solve(sys, scfg);
    out.dim = sys.u_dim();  // dim X^δ is the reported abscissa
    out.estimator0 = std::sqrt(rep.estimator0);
    out.estimator_eps = std::sqrt(rep.estimator_eps);
    out.iters = rep.iterations;
    out.converged = rep.converged;
    out.reason = rep.reason;
    out.spectral = rep.spectral;
    out.stop_transcript = std::move(rep.stop_transcript);
    if (!cfg.slice_times.empty())
      out.slice_errors = time_slice_errors(sys.spaces, rep.u, data.solution, cfg.slice_times);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("loglog_slope: need >= 2 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepResult run_consistent_sweep(const SweepSpec& spec) {
  SweepResult result;
  result.spec = spec;
  result.slice_times = {0.0, 0.25, 0.5, 0.75, 1.0};
  result.cells.resize(spec.level_exponents.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= spec.level_exponents.size()) break;
      const int k = spec.level_exponents[i];
      const int n = 1 << k;
      const double h = 1.0 / n;

      SingleRunConfig cfg;
      cfg.formulation = spec.formulation;
      cfg.n = n;
      cfg.eps = spec.eps_rule.eval(h);
      cfg.ell = spec.ell;
      cfg.estimate_level = spec.estimate_level;
      cfg.window = spec.window;
      cfg.lambda = spec.lambda;
      cfg.problem_id = spec.problem_id;
      cfg.stop_mu = spec.stop_mu;
      cfg.max_iters = spec.max_iters;
      cfg.slice_times = result.slice_times;
      const SingleRunResult r = run_single(cfg);

      SweepCell& cell = result.cells[i];
      cell.formulation = spec.formulation;
      cell.h = h;
      cell.dim = r.dim;
      cell.eps = cfg.eps;
      cell.ell = spec.ell;
      cell.estimate_level = spec.estimate_level;
      cell.estimator0 = r.estimator0;
      cell.estimator_eps = r.estimator_eps;
      cell.iters = r.iters;
      cell.cond_est = r.spectral.cond_est;
      cell.slice_errors = r.slice_errors;
    }
  };
  const int nthreads = std::min<int>(sweep_thread_cap(), static_cast<int>(result.cells.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (result.cells.size() >= 2) {
    std::vector<double> dims, ests;
    for (const SweepCell& c : result.cells) {
      dims.push_back(c.dim);
      ests.push_back(c.estimator0);
    }
    result.slope = loglog_slope(dims, ests);
  }
  return result;
}

std::vector<ConditionCell> run_condition_sweep(Formulation formulation,
                                               const std::vector<double>& eps_list,
                                               const std::vector<int>& level_exponents, int ell) {
  std::vector<ConditionCell> cells(eps_list.size() * level_exponents.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) break;
      const double eps = eps_list[i / level_exponents.size()];
      const int k = level_exponents[i % level_exponents.size()];
      const int n = 1 << k;

      SingleRunConfig cfg;
      cfg.formulation = formulation;
      cfg.n = n;
      cfg.eps = eps;
      cfg.ell = ell;
      cfg.estimate_level = ell;
      cfg.coupled_stop = false;  // long run resolves the extremal Ritz values
      cfg.tol = 1e-12;
      cfg.max_iters = 100000;
      cfg.record_lanczos = true;
      const SingleRunResult r = run_single(cfg);

      cells[i] = {formulation,
                  1.0 / n,
                  eps,
                  r.iters,
                  r.spectral.cond_est,
                  r.spectral.lambda_min_est,
                  r.spectral.lambda_max_est};
    }
  };
  const int nthreads = std::min<int>(sweep_thread_cap(), static_cast<int>(cells.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return cells;
}

RefinementTrace run_inconsistent_loop(const SweepSpec& spec, double stagnation_c,
                                      int post_stop_levels) {
  RefinementTrace trace;
  double threshold = 0.0;
  int remaining_post = post_stop_levels;

  for (size_t i = 0; i < spec.level_exponents.size(); ++i) {
    const int k = spec.level_exponents[i];
    const int n = 1 << k;
    const double h = 1.0 / n;

    SingleRunConfig cfg;
    cfg.formulation = spec.formulation;
    cfg.n = n;
    cfg.eps = spec.eps_rule.eval(h);
    cfg.ell = spec.ell;
    cfg.estimate_level = spec.estimate_level;
    cfg.window = spec.window;
    cfg.lambda = spec.lambda;
    cfg.problem_id = spec.problem_id;
    cfg.stop_mu = spec.stop_mu;
    cfg.max_iters = spec.max_iters;
    cfg.probe_stride = 2;
    const SingleRunResult r = run_single(cfg);

    RefinementLevel level;
    level.h = h;
    level.dim = r.dim;
    level.estimator = r.estimator0;
    level.iters = r.iters;
    level.post_stop = trace.stagnated;
    level.reduction = trace.levels.empty() ? 0.0 : r.estimator0 / trace.levels.back().estimator;
    trace.levels.push_back(level);

    if (trace.levels.size() == 2) {
      // observed early rate, measured over the first two levels
      trace.rho = level.reduction;
      threshold = (1.0 + stagnation_c * trace.rho) / (1.0 + stagnation_c);
    }
    if (!trace.stagnated && trace.levels.size() >= 3 && level.reduction > threshold) {
      trace.stagnated = true;
      trace.stop_index = static_cast<int>(i);
      trace.levels.back().post_stop = false;  // the level that fired the rule
    } else if (trace.stagnated) {
      if (--remaining_post <= 0) break;
    }
  }
  trace.plateau = trace.levels.empty() ? 0.0 : trace.levels.back().estimator;
  if (!trace.stagnated)
    trace.message = "refinement list exhausted without stagnation";
  else
    trace.message = "stagnation rule fired";
  return trace;
}

double estimate_consistency_error(const SweepSpec& spec) {
  const int k = spec.level_exponents.back();
  const int n = 1 << k;
  SingleRunConfig cfg;
  cfg.formulation = spec.formulation;
  cfg.n = n;
  cfg.eps = spec.eps_rule.eval(1.0 / n);
  cfg.ell = spec.ell;
  cfg.estimate_level = spec.estimate_level;
  cfg.window = spec.window;
  cfg.lambda = spec.lambda;
  cfg.problem_id = spec.problem_id;
  cfg.max_iters = spec.max_iters;
  return run_single(cfg).estimator0;
}

namespace {

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::ostringstream os;
  os << "formulation,h,dim,eps,ell,L,estimator0,estimator_eps,iters,cond_est\n";
  for (const SweepCell& c : cells) {
    os << to_string(c.formulation) << ',' << format_double(c.h) << ',' << c.dim << ','
       << format_double(c.eps) << ',' << c.ell << ',' << c.estimate_level << ','
       << format_double(c.estimator0) << ',' << format_double(c.estimator_eps) << ',' << c.iters
       << ',' << format_double(c.cond_est) << '\n';
  }
  return os.str();
}

std::string condition_csv(const std::vector<ConditionCell>& cells, Formulation f, int ell) {
  std::ostringstream os;
  os << "formulation,h,dim,eps,ell,L,estimator0,estimator_eps,iters,cond_est\n";
  for (const ConditionCell& c : cells) {
    const int n = static_cast<int>(std::lround(1.0 / c.h));
    const int dim = (n + 1) * (n - 1);
    os << to_string(f) << ',' << format_double(c.h) << ',' << dim << ',' << format_double(c.eps)
       << ',' << ell << ',' << ell << ",,," << c.iters << ',' << format_double(c.cond_est)
       << '\n';
  }
  return os.str();
}

std::string trace_csv(const RefinementTrace& trace, const SweepSpec& spec) {
  std::ostringstream os;
  os << "formulation,h,dim,eps,ell,L,estimator0,estimator_eps,iters,cond_est,reduction,post_stop\n";
  for (const RefinementLevel& l : trace.levels) {
    os << to_string(spec.formulation) << ',' << format_double(l.h) << ',' << l.dim << ','
       << format_double(spec.eps_rule.eval(l.h)) << ',' << spec.ell << ',' << spec.estimate_level
       << ',' << format_double(l.estimator) << ",," << l.iters << ",,"
       << format_double(l.reduction) << ',' << (l.post_stop ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace paradat
