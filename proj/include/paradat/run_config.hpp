#pragma once

#include <string>
#include <vector>

namespace paradat {

/// Parsed CLI configuration; render() and parse() round-trip exactly and
/// unknown keys are rejected.
struct RunConfig {
  std::string subcommand;  // solve | sweep | condition | inconsistent | infsup | appendix
  std::string formulation = "second-order";
  int n = 16;
  std::vector<int> levels{3, 4, 5, 6, 7};
  std::string eps = "h";
  double omega_lo = 0.25;
  double omega_hi = 0.75;
  double lambda = 0.0;
  int ell = 0;
  int estimate_level = 2;
  std::string stop = "coupled";  // coupled | tol=<t>
  double stop_mu = 1.0;
  double stagnation_c = 1.0 / 3.0;
  int post_stop_levels = 1;
  std::string problem = "t3sin";
  std::vector<double> eps_list{1.0, 0.1, 0.01, 0.001};
  int d = 1;
  int q = 1;
  std::string rule = "bisection";
  int max_gen = 3;
  int max_iters = 20000;
  bool check = false;
  std::string out;
  std::string manifest;
  unsigned seed = 0;
  int verbosity = 1;

  std::string render() const;                      // canonical JSON
  static RunConfig parse(const std::string& json);  // throws on unknown keys
  /// Empty when valid, else a message ("n must be >= 1", ...).
  std::string validate() const;

  bool operator==(const RunConfig&) const = default;
};

}  // namespace paradat
