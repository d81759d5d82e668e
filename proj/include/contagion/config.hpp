#pragma once

#include <cstdint>
#include <string>

#include "contagion/contracts.hpp"
#include "contagion/model.hpp"

namespace contagion {

/// Scenario description parsed from the sectioned key=value config format.
/// Unknown keys are rejected; every diagnostic names the offending key.
struct ScenarioConfig {
  ModelParams model;
  RetentionContract contract = RetentionContract::proportional();
  PremiumPrinciple principle;

  // [grids]
  std::size_t t_points = 11;
  double lambda_min = 1.0;
  double lambda_max = 2.0;
  std::size_t lambda_points = 11;
  std::size_t n_paths = 10000;
  std::uint64_t master_seed = 1;

  // [run]
  std::size_t sim_paths = 8;               // paths dumped by `simulate`
  std::size_t timechange_min_claims = 10000;
  double policy_u = 1.0;                   // constant policy for phi/check
  bool policy_u_set = false;
  double policy_tol = 1e-4;
  int max_iterations = 50;
  double compare_tol = 1e-4;
  std::size_t probe_points = 5;            // monotonicity probe grid per axis
  std::size_t check_u_points = 5;          // constant-policy sweep in gates

  std::uint64_t config_hash = 0;  // FNV-1a of the raw config text

  std::vector<double> t_grid() const;
  std::vector<double> lambda_grid() const;
};

ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace contagion
