#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace asqg {

/// Every tunable of an experiment. Field names mirror the dotted config keys.
struct ExperimentConfig {
  // data.*
  double alpha = 0.5;
  double beta_amp = 0.1;
  int n0 = 4;
  int N = 8;
  double amplitude_scale = 1.0;
  // particles.*
  int nodes_per_bubble = 1024;
  double eps_kappa = 0.5;
  // flow.*
  double dt_max = 1e-3;
  double cfl = 0.2;
  double T = 0.05;
  double output_cadence = 1e-3;
  double wall_budget = 0.0;  ///< seconds, 0 = unlimited
  // tracers.*
  std::string tracer_spec = "centers";
  // diagnostics.*
  bool riesz = true;
  int riesz_cells = 16;
  int holder_pairs = 4096;
  int pair_budget = 2000;
  // stability.*
  double perturbation = 0.01;
  // run.*
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Throws ConfigError naming the first key that violates its range.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses `key = value` lines. Keys are dotted (`data.alpha`); a `[data]` header
/// prefixes the keys below it; bare names (`alpha`) are accepted as shorthand.
/// `#` starts a comment. Unknown keys and malformed values throw ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Canonical form: every key, dotted, in fixed order, shortest round-trip numbers.
std::string save_config(const ExperimentConfig& cfg);

}  // namespace asqg
