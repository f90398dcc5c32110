#include "paradat/run_config.hpp"

#include <set>
#include <stdexcept>

#include <json.hpp>

#include "paradat/experiments.hpp"

namespace paradat {

using nlohmann::json;

std::string RunConfig::render() const {
  json j;
  j["subcommand"] = subcommand;
  j["formulation"] = formulation;
  j["n"] = n;
  j["levels"] = levels;
  j["eps"] = eps;
  j["omega_lo"] = omega_lo;
  j["omega_hi"] = omega_hi;
  j["lambda"] = lambda;
  j["ell"] = ell;
  j["estimate_level"] = estimate_level;
  j["stop"] = stop;
  j["stop_mu"] = stop_mu;
  j["stagnation_c"] = stagnation_c;
  j["post_stop_levels"] = post_stop_levels;
  j["problem"] = problem;
  j["eps_list"] = eps_list;
  j["d"] = d;
  j["q"] = q;
  j["rule"] = rule;
  j["max_gen"] = max_gen;
  j["max_iters"] = max_iters;
  j["check"] = check;
  j["out"] = out;
  j["manifest"] = manifest;
  j["seed"] = seed;
  j["verbosity"] = verbosity;
  return j.dump(2);
}

RunConfig RunConfig::parse(const std::string& text) {
  const json j = json::parse(text);
  static const std::set<std::string> known{
      "subcommand", "formulation", "n",        "levels",    "eps",
      "omega_lo",   "omega_hi",    "lambda",   "ell",       "estimate_level",
      "stop",       "stop_mu",     "stagnation_c", "post_stop_levels", "problem",
      "eps_list",   "d",           "q",        "rule",      "max_gen",
      "max_iters",  "check",       "out",      "manifest",  "seed",
      "verbosity"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw std::invalid_argument("RunConfig: unknown key '" + it.key() + "'");

  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("subcommand", c.subcommand);
  get("formulation", c.formulation);
  get("n", c.n);
  get("levels", c.levels);
  get("eps", c.eps);
  get("omega_lo", c.omega_lo);
  get("omega_hi", c.omega_hi);
  get("lambda", c.lambda);
  get("ell", c.ell);
  get("estimate_level", c.estimate_level);
  get("stop", c.stop);
  get("stop_mu", c.stop_mu);
  get("stagnation_c", c.stagnation_c);
  get("post_stop_levels", c.post_stop_levels);
  get("problem", c.problem);
  get("eps_list", c.eps_list);
  get("d", c.d);
  get("q", c.q);
  get("rule", c.rule);
  get("max_gen", c.max_gen);
  get("max_iters", c.max_iters);
  get("check", c.check);
  get("out", c.out);
  get("manifest", c.manifest);
  get("seed", c.seed);
  get("verbosity", c.verbosity);
  return c;
}

std::string RunConfig::validate() const {
  if (n < 1) return "n must be >= 1";
  if (!(omega_lo >= 0.0 && omega_lo < omega_hi && omega_hi <= 1.0))
    return "omega must satisfy 0 <= lo < hi <= 1";
  if (formulation != "second-order" && formulation != "fosls")
    return "formulation must be 'second-order' or 'fosls'";
  if (ell < 0) return "ell must be >= 0";
  if (estimate_level < 0) return "estimate-level must be >= 0";
  if (levels.empty()) return "levels must be non-empty";
  for (int k : levels)
    if (k < 1 || k > 24) return "levels must lie in 1..24";
  if (stop != "coupled" && stop.rfind("tol=", 0) != 0) return "stop must be 'coupled' or 'tol=<t>'";
  if (stop.rfind("tol=", 0) == 0) {
    try {
      if (std::stod(stop.substr(4)) <= 0.0) return "stop tolerance must be > 0";
    } catch (const std::exception&) {
      return "stop tolerance must be a number";
    }
  }
  try {
    EpsRule::parse(eps);
  } catch (const std::exception&) {
    return "eps must be 'h', 'h^<p>', '0', or a float";
  }
  if (max_iters < 1) return "max-iters must be >= 1";
  if (d != 1 && d != 2) return "d must be 1 or 2";
  if (rule != "bisection" && rule != "red") return "rule must be 'bisection' or 'red'";
  if (max_gen < 1) return "max-gen must be >= 1";
  if (stagnation_c <= 0.0) return "C must be > 0";
  return "";
}

}  // namespace paradat
