#pragma once
// Seeded worker and task simulation: proficiency sampling, ground-truth
// generation, strategy construction, and strategy-driven answering of
// drafted batches.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "dbt/mechanism.hpp"
#include "dbt/model.hpp"
#include "dbt/rng.hpp"

namespace dbt {

struct ProficiencySpec {
  enum class Kind { beta_diagonal, uniform_diagonal };
  Kind kind = Kind::beta_diagonal;  // Beta(5,1) diagonals / uniform (1/k, 1]
  int k = 2;
};

// Diagonal entries drawn independently from the spec's family; the
// remaining row mass split by a symmetric Dirichlet draw.
StochasticMatrix sample_proficiency(const ProficiencySpec& spec, Rng& rng);

enum class StrategyTag { truthful, heuristic, permutation, mixed };

const char* to_string(StrategyTag tag);

struct WorkerSpec {
  std::string id;
  StochasticMatrix proficiency;
  WorkerStrategy strategy;
  StrategyTag tag;
};

WorkerStrategy truthful_strategy(int k);
WorkerStrategy heuristic_strategy(std::vector<double> report_vector);
WorkerStrategy uniform_heuristic_strategy(int k);
// Full-cycle relabeling y = (x + shift) mod k; the binary case reports
// the opposite of the obtained answer.
WorkerStrategy permutation_strategy(int k, int shift = 1);
// Random row-stochastic reporting matrix (a random mixture of pure
// reporting strategies folded into one matrix).
WorkerStrategy mixed_strategy(int k, Rng& rng);

// Consistency check between a tag and the strategy it labels.
bool tag_matches_strategy(StrategyTag tag, const WorkerStrategy& strategy);

// Ground truth per task, sampled from the prior.
class GroundTruthTable {
 public:
  void set(TaskId task, int label) { truths_[task] = label; }
  bool contains(TaskId task) const { return truths_.count(task) > 0; }
  int label(TaskId task) const;
  std::size_t size() const { return truths_.size(); }

  // Draws labels for any tasks not present yet.
  void ensure(std::span<const TaskId> tasks, const Prior& prior, Rng& rng);

 private:
  std::unordered_map<TaskId, int> truths_;
};

// n fresh tasks with ids 0..n-1.
GroundTruthTable sample_ground_truths(std::int64_t n, const Prior& prior, Rng& rng);

// One answer per batch task, shared portion first: observe through the
// proficiency matrix under effort, then report through the strategy.
std::vector<TaskAnswer> simulate_submission(const WorkerSpec& worker, const Batch& batch,
                                            const GroundTruthTable& truths, Rng& rng);

}  // namespace dbt
