#pragma once
// Experiment harness: full simulated mechanism runs, the reward
// distribution and shared-task robustness studies, dominance and
// fairness checks, and the data files they emit. Repeats run in
// parallel on derived seeds; aggregation is order-independent.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dbt/config.hpp"

namespace dbt {

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
  std::int64_t n = 0;
};
MeanStd mean_std(std::span<const double> xs);

// Runs fn(0..n-1) across hardware threads; rethrows the first failure.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct SummaryRow {
  std::string strategy_tag;
  int shared_tasks;  // sweep point; 0 when not applicable
  double mean_reward;
  double std_reward;
  std::int64_t n;
};

// One full mechanism run over the configured rounds of simulated workers.
struct SimulationOutput {
  std::vector<LedgerEvaluation> evaluations;
  RunReport report;
  std::string ledger_csv;  // filled when keep_exports
  std::string pool_json;
};
SimulationOutput run_simulation(const ExperimentConfig& config, std::uint64_t seed,
                                bool keep_exports = false);

// Reward distribution across strategies, pooled over `repeats` runs.
struct RewardSample {
  int run;
  LedgerEvaluation eval;
};
struct RewardDistributionResult {
  std::vector<RewardSample> samples;
  std::vector<SummaryRow> summary;  // pooled per strategy tag
};
RewardDistributionResult run_reward_distribution(const ExperimentConfig& config);

// Mean reward per strategy under each shared-task count in the sweep.
struct SweepRunRow {
  int shared_tasks;
  int run;
  std::string strategy_tag;
  double mean_reward;
  std::int64_t n_evaluations;
};
struct SweepResult {
  std::vector<SweepRunRow> runs;    // raw per-run means
  std::vector<SummaryRow> summary;  // across-run mean/std; n = number of runs
};
SweepResult run_shared_task_sweep(const ExperimentConfig& config);

// Truthful-vs-alternatives comparison for probe workers against pools
// built from fixed population strategy profiles.
struct DominanceOptions {
  int probes = 20;
  int repeats = 30;
  int shared_tasks = 10000;
  double dominance_margin = 0.1;      // probe resampling margin on column dominance
  double mixture_offdiag_min = 0.15;  // keeps random mixtures away from identity
};
struct DominanceRow {
  int probe;
  double probe_trace;
  std::string population;
  std::string strategy;
  double mean_reward;
  double mean_net_utility;   // reward minus cost of effort where effort is spent
  double margin_vs_truthful; // 0 on the truthful row itself
  int repeats_used;
  bool dominance_condition_ok;
  bool beta_bound_ok;
  std::string note;
};
struct DominanceResult {
  std::vector<DominanceRow> rows;
};
DominanceResult run_dominance_check(const ExperimentConfig& config,
                                    const DominanceOptions& options = {},
                                    std::span<const StochasticMatrix> explicit_probes = {});

// Probe mean reward across peer archetypes of differing trace/strategy.
struct FairnessOptions {
  int repeats = 200;
  int shared_tasks = 2000;
};
struct FairnessRow {
  std::string archetype;
  double peer_trace;
  std::string status;  // "ok" or "not_applicable"
  double mean_reward;
  double std_reward;
  int n;
};
struct FairnessResult {
  std::vector<FairnessRow> rows;
  double max_spread;  // across applicable archetype means
};
FairnessResult run_fairness_check(const ExperimentConfig& config,
                                  const FairnessOptions& options = {});

// File emission; each writer returns the file names written under out_dir.
std::vector<std::string> write_simulation_files(const SimulationOutput& output,
                                                const ExperimentConfig& config,
                                                std::uint64_t seed,
                                                const std::string& out_dir);
std::vector<std::string> write_reward_files(const RewardDistributionResult& result,
                                            const ExperimentConfig& config, std::uint64_t seed,
                                            const std::string& out_dir);
std::vector<std::string> write_sweep_files(const SweepResult& result,
                                           const ExperimentConfig& config, std::uint64_t seed,
                                           const std::string& out_dir);
std::vector<std::string> write_dominance_files(const DominanceResult& result,
                                               const ExperimentConfig& config,
                                               std::uint64_t seed, const std::string& out_dir);
std::vector<std::string> write_fairness_files(const FairnessResult& result,
                                              const ExperimentConfig& config,
                                              std::uint64_t seed, const std::string& out_dir);

}  // namespace dbt
