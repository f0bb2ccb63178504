#pragma once
// Experiment configuration: defaults, strict JSON loading (unknown keys
// are errors), and the manifest echo written next to every output set.

#include <cstdint>
#include <string>
#include <vector>

#include "dbt/agents.hpp"
#include "dbt/mechanism.hpp"

namespace dbt {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct ExperimentConfig {
  MechanismConfig mechanism;
  ProficiencySpec proficiency;
  std::vector<int> rounds{5, 25, 125, 625};
  // Probability of a worker playing truthful / heuristic / permutation /
  // mixed. Three-entry configs leave mixed at zero.
  std::vector<double> strategy_mix{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0};
  std::vector<int> shared_task_sweep{10, 30, 100, 300};
  int repeats = 100;
  std::uint64_t seed = 1;

  ExperimentConfig();

  int total_workers() const;
  void validate() const;
};

// Parses a config JSON file. Any key not in the schema is an error; keys
// left out keep their defaults.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);

// Config echo for manifests; parse(serialize(c)) round-trips.
std::string config_to_json(const ExperimentConfig& config);

std::string manifest_json(const ExperimentConfig& config, const std::string& command,
                          std::uint64_t seed, const std::vector<std::string>& files);

}  // namespace dbt
