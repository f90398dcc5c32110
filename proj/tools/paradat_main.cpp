// paradat: space-time least-squares recovery of parabolic states from
// partial observations. Subcommands drive the solvers, the convergence and
// conditioning sweeps, the inconsistent-data refinement loop, and the
// reference-element inf-sup checks.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "paradat/experiments.hpp"
#include "paradat/infsup.hpp"
#include "paradat/run_config.hpp"

namespace {

using nlohmann::json;
using namespace paradat;

constexpr const char* kVersion = "0.1.0";

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
  os << content;
}

json manifest_json(const RunConfig& cfg) {
  json m;
  m["tool"] = "paradat";
  m["version"] = kVersion;
  m["timestamp"] = timestamp();
  m["config"] = json::parse(cfg.render());
  return m;
}

void emit_manifest(const RunConfig& cfg) {
  if (!cfg.manifest.empty()) write_file(cfg.manifest, manifest_json(cfg).dump(2) + "\n");
}

Formulation parse_formulation(const std::string& s) {
  return s == "fosls" ? Formulation::Fosls : Formulation::SecondOrder;
}

SweepSpec spec_from_config(const RunConfig& cfg) {
  SweepSpec spec;
  spec.formulation = parse_formulation(cfg.formulation);
  spec.level_exponents = cfg.levels;
  spec.eps_rule = EpsRule::parse(cfg.eps);
  spec.ell = cfg.ell;
  spec.estimate_level = cfg.estimate_level;
  spec.window = ObservationWindow(cfg.omega_lo, cfg.omega_hi);
  spec.lambda = cfg.lambda;
  spec.problem_id = cfg.problem;
  spec.stop_mu = cfg.stop_mu;
  spec.max_iters = cfg.max_iters;
  return spec;
}

int cmd_solve(const RunConfig& cfg) {
  SingleRunConfig rc;
  rc.formulation = parse_formulation(cfg.formulation);
  rc.n = cfg.n;
  rc.eps = EpsRule::parse(cfg.eps).eval(1.0 / cfg.n);
  rc.ell = cfg.ell;
  rc.estimate_level = cfg.estimate_level;
  rc.window = ObservationWindow(cfg.omega_lo, cfg.omega_hi);
  rc.lambda = cfg.lambda;
  rc.problem_id = cfg.problem;
  rc.max_iters = cfg.max_iters;
  rc.stop_mu = cfg.stop_mu;
  rc.slice_times = {0.0, 0.25, 0.5, 0.75, 1.0};
  if (cfg.stop.rfind("tol=", 0) == 0) {
    rc.coupled_stop = false;
    rc.tol = std::stod(cfg.stop.substr(4));
  }

  SingleRunResult r;
  try {
    r = run_single(rc);
  } catch (const std::exception& e) {
    std::cerr << "solver failure (assembly/solve): " << e.what() << "\n";
    return 3;
  }
  if (!r.converged) {
    std::cerr << "solver failure (pcg): " << r.reason << "\n";
    return 3;
  }

  json out;
  out["manifest"] = manifest_json(cfg);
  out["h"] = r.h;
  out["dim"] = r.dim;
  out["eps"] = rc.eps;
  out["estimator0"] = r.estimator0;
  out["estimator_eps"] = r.estimator_eps;
  out["iters"] = r.iters;
  out["cond_est"] = r.spectral.cond_est;
  out["lambda_min_est"] = r.spectral.lambda_min_est;
  out["lambda_max_est"] = r.spectral.lambda_max_est;
  out["slice_times"] = {0.0, 0.25, 0.5, 0.75, 1.0};
  out["slice_errors"] = r.slice_errors;
  out["stop_reason"] = r.reason;

  const std::string text = out.dump(2) + "\n";
  if (!cfg.out.empty())
    write_file(cfg.out, text);
  else
    std::cout << text;
  if (cfg.verbosity > 0 && !cfg.out.empty())
    std::cout << "estimator0 " << r.estimator0 << "  iters " << r.iters << "  -> " << cfg.out
              << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  const SweepSpec spec = spec_from_config(cfg);
  SweepResult result;
  try {
    result = run_consistent_sweep(spec);
  } catch (const std::exception& e) {
    std::cerr << "solver failure (sweep): " << e.what() << "\n";
    return 3;
  }
  const std::string csv = sweep_csv(result.cells);
  if (!cfg.out.empty())
    write_file(cfg.out, csv);
  else
    std::cout << csv;
  emit_manifest(cfg);
  if (cfg.verbosity > 0) std::cout << "slope " << result.slope << "\n";
  if (cfg.check) {
    const bool ok = result.slope >= -0.55 && result.slope <= -0.45;
    std::cout << (ok ? "CHECK PASS" : "CHECK FAIL") << ": slope " << result.slope
              << " (expected in [-0.55, -0.45])\n";
    return ok ? 0 : 1;
  }
  return 0;
}

int cmd_condition(const RunConfig& cfg) {
  std::vector<ConditionCell> cells;
  try {
    cells = run_condition_sweep(parse_formulation(cfg.formulation), cfg.eps_list, cfg.levels,
                                cfg.ell);
  } catch (const std::exception& e) {
    std::cerr << "solver failure (condition sweep): " << e.what() << "\n";
    return 3;
  }
  const std::string csv = condition_csv(cells, parse_formulation(cfg.formulation), cfg.ell);
  if (!cfg.out.empty())
    write_file(cfg.out, csv);
  else
    std::cout << csv;
  emit_manifest(cfg);
  return 0;
}

int cmd_inconsistent(const RunConfig& cfg) {
  SweepSpec spec = spec_from_config(cfg);
  RefinementTrace trace;
  try {
    trace = run_inconsistent_loop(spec, cfg.stagnation_c, cfg.post_stop_levels);
  } catch (const std::exception& e) {
    std::cerr << "solver failure (refinement loop): " << e.what() << "\n";
    return 3;
  }
  const std::string csv = trace_csv(trace, spec);
  if (!cfg.out.empty())
    write_file(cfg.out, csv);
  else
    std::cout << csv;
  emit_manifest(cfg);
  if (cfg.verbosity > 0) {
    std::cout << trace.message;
    if (trace.stagnated)
      std::cout << " at level " << trace.stop_index << "; plateau " << trace.plateau;
    std::cout << "\n";
  }
  return 0;
}

int cmd_infsup(const RunConfig& cfg) {
  using namespace paradat::infsup;
  const RefineRule rule = cfg.rule == "red" ? RefineRule::Red : RefineRule::Bisection;
  std::vector<AlphaRow> rows;
  try {
    rows = alpha_table(cfg.d, cfg.q, rule, cfg.max_gen);
  } catch (const std::exception& e) {
    std::cerr << "infsup failure: " << e.what() << "\n";
    return 3;
  }
  const std::string csv = alpha_csv(rows);
  if (!cfg.out.empty())
    write_file(cfg.out, csv);
  else
    std::cout << csv;
  emit_manifest(cfg);
  return 0;
}

int cmd_appendix(const RunConfig& cfg) {
  using namespace paradat::infsup;
  AppendixResult res;
  try {
    res = appendix_biorthogonalize();
  } catch (const std::exception& e) {
    std::cerr << "appendix failure: " << e.what() << "\n";
    return 3;
  }

  double mass_err = 0.0, gram_err = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double expected = (i == j) ? 1.0 : 0.0;
      if (i < 3 && j >= 3)
        expected = (i == j - 3) ? 9.0 / 32.0 - 31.0 / 32.0 : -31.0 / 32.0;
      else if (i >= 3 && j < 3)
        expected = 0.0;
      mass_err = std::max(mass_err, std::abs(res.generalized_mass(i, j) - expected));
      gram_err = std::max(gram_err,
                          std::abs(res.biorthogonal_gram(i, j) - ((i == j) ? 1.0 : 0.0)));
    }
  const bool pass = mass_err <= 1e-12 && gram_err <= 1e-12;

  std::ostringstream os;
  os.precision(15);
  os << "generalized mass matrix (rows v,e; columns v~,e~):\n";
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) os << res.generalized_mass(i, j) << (j == 5 ? "\n" : " ");
  }
  os << "max deviation from [[Id, 9/32 Id - 31/32 1],[0, Id]]: " << mass_err << "\n";
  os << "max deviation of the biorthogonalized Gram from Id:  " << gram_err << "\n";
  os << (pass ? "PASS" : "FAIL") << "\n";
  std::cout << os.str();

  if (!cfg.out.empty()) {
    json j;
    j["manifest"] = manifest_json(cfg);
    j["generalized_mass"] = json::array();
    j["biorthogonal_gram"] = json::array();
    for (int i = 0; i < 6; ++i) {
      json r1 = json::array(), r2 = json::array();
      for (int jj = 0; jj < 6; ++jj) {
        r1.push_back(res.generalized_mass(i, jj));
        r2.push_back(res.biorthogonal_gram(i, jj));
      }
      j["generalized_mass"].push_back(r1);
      j["biorthogonal_gram"].push_back(r2);
    }
    j["max_mass_deviation"] = mass_err;
    j["max_gram_deviation"] = gram_err;
    j["pass"] = pass;
    write_file(cfg.out, j.dump(2) + "\n");
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"paradat: space-time least-squares data assimilation for parabolic problems"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string omega = "0.25,0.75";
  std::string levels = "3:7";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--formulation", cfg.formulation, "second-order | fosls")
        ->default_str(cfg.formulation);
    sub->add_option("--eps", cfg.eps, "regularization rule: h, h^<p>, 0, or a float")
        ->default_str(cfg.eps);
    sub->add_option("--omega", omega, "observation window lo,hi")->default_str(omega);
    sub->add_option("--lambda", cfg.lambda, "data perturbation f <- f + lambda*1")
        ->default_str("0");
    sub->add_option("--ell", cfg.ell, "test-space refinement level of the solve")
        ->default_str("0");
    sub->add_option("--estimate-level,--L", cfg.estimate_level,
                    "test-space level of the reported estimator")
        ->default_str("2");
    sub->add_option("--problem", cfg.problem, "manufactured problem id")->default_str(cfg.problem);
    sub->add_option("--stop", cfg.stop, "coupled | tol=<t>")->default_str(cfg.stop);
    sub->add_option("--mu", cfg.stop_mu, "constant in the coupled stop rule")->default_str("1");
    sub->add_option("--max-iters", cfg.max_iters, "PCG iteration cap")->default_str("20000");
    sub->add_option("--out", cfg.out, "output file (stdout when omitted)");
    sub->add_option("--manifest", cfg.manifest, "write a JSON run manifest here");
    sub->add_option("--seed", cfg.seed, "rng seed (reserved for property tooling)")
        ->default_str("0");
    sub->add_option("--verbosity", cfg.verbosity, "0 = quiet")->default_str("1");
  };

  CLI::App* solve = app.add_subcommand("solve", "one assimilation solve; JSON report");
  add_common(solve);
  solve->add_option("--n", cfg.n, "cells per direction")->default_str("16");

  CLI::App* sweep = app.add_subcommand("sweep", "consistent-data convergence sweep; CSV");
  add_common(sweep);
  sweep->add_option("--levels", levels, "mesh levels k (h = 2^-k), e.g. 3:7 or 3,5,7")
      ->default_str(levels);
  sweep->add_flag("--check", cfg.check, "exit nonzero unless the slope is in [-0.55,-0.45]");

  CLI::App* condition = app.add_subcommand("condition", "Lanczos condition-number sweep; CSV");
  add_common(condition);
  std::string eps_list = "1,0.1,0.01,0.001";
  condition->add_option("--eps-list", eps_list, "comma-separated eps values")
      ->default_str(eps_list);
  condition->add_option("--levels", levels, "mesh levels k (h = 2^-k)")->default_str(levels);

  CLI::App* inconsistent =
      app.add_subcommand("inconsistent", "inconsistent-data stagnation loop; CSV");
  add_common(inconsistent);
  inconsistent->add_option("--levels", levels, "mesh levels k (h = 2^-k)")->default_str(levels);
  inconsistent->add_option("--C", cfg.stagnation_c, "stagnation constant")->default_str("0.3333");
  inconsistent->add_option("--post-stop-levels", cfg.post_stop_levels,
                           "levels run past the stagnation point")
      ->default_str("1");

  CLI::App* infsup_cmd = app.add_subcommand("infsup", "reference-element inf-sup table; CSV");
  infsup_cmd->add_option("--d", cfg.d, "dimension (1 or 2)")->default_str("1");
  infsup_cmd->add_option("--q", cfg.q, "polynomial degree")->default_str("1");
  infsup_cmd->add_option("--rule", cfg.rule, "bisection | red")->default_str(cfg.rule);
  infsup_cmd->add_option("--max-gen", cfg.max_gen, "largest refinement generation")
      ->default_str("3");
  infsup_cmd->add_option("--out", cfg.out, "output file (stdout when omitted)");
  infsup_cmd->add_option("--manifest", cfg.manifest, "write a JSON run manifest here");

  CLI::App* appendix = app.add_subcommand("appendix", "biorthogonal construction checks");
  appendix->add_option("--out", cfg.out, "JSON output with both matrices");
  appendix->add_option("--manifest", cfg.manifest, "write a JSON run manifest here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // shared string options -> config fields
  try {
    const size_t comma = omega.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("omega must be lo,hi");
    cfg.omega_lo = std::stod(omega.substr(0, comma));
    cfg.omega_hi = std::stod(omega.substr(comma + 1));
    cfg.levels.clear();
    const size_t colon = levels.find(':');
    if (colon != std::string::npos) {
      const int lo = std::stoi(levels.substr(0, colon));
      const int hi = std::stoi(levels.substr(colon + 1));
      for (int k = lo; k <= hi; ++k) cfg.levels.push_back(k);
    } else {
      std::stringstream ss(levels);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.levels.push_back(std::stoi(tok));
    }
    if (condition->parsed()) {
      cfg.eps_list.clear();
      std::stringstream ss(eps_list);
      std::string tok;
      while (std::getline(ss, tok, ',')) cfg.eps_list.push_back(std::stod(tok));
    }
  } catch (const std::exception& e) {
    std::cerr << "bad flags: " << e.what() << "\n";
    return 2;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  const std::string err = cfg.validate();
  if (!err.empty()) {
    std::cerr << "bad flags: " << err << "\n";
    return 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg);
    if (condition->parsed()) return cmd_condition(cfg);
    if (inconsistent->parsed()) return cmd_inconsistent(cfg);
    if (infsup_cmd->parsed()) return cmd_infsup(cfg);
    if (appendix->parsed()) return cmd_appendix(cfg);
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
