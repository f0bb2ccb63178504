#include "dbt/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace dbt {

StochasticMatrix sample_proficiency(const ProficiencySpec& spec, Rng& rng) {
  if (spec.k < 2) throw std::invalid_argument("proficiency spec needs k >= 2");
  const std::size_t k = static_cast<std::size_t>(spec.k);
  Matrix a(k, k);
  for (std::size_t g = 0; g < k; ++g) {
    const double diag = spec.kind == ProficiencySpec::Kind::beta_diagonal
                            ? rng.beta_alpha_one(5.0)
                            : 1.0 / spec.k + rng.uniform_open() * (1.0 - 1.0 / spec.k);
    a(g, g) = diag;
    if (k == 2) {
      a(g, 1 - g) = 1.0 - diag;
      continue;
    }
    // Symmetric Dirichlet split of the off-diagonal mass.
    std::vector<double> w(k - 1);
    double sum = 0.0;
    for (double& x : w) {
      x = rng.exponential();
      sum += x;
    }
    std::size_t idx = 0;
    for (std::size_t y = 0; y < k; ++y) {
      if (y == g) continue;
      a(g, y) = (1.0 - diag) * (w[idx] / sum);
      ++idx;
    }
  }
  return StochasticMatrix(std::move(a));
}

const char* to_string(StrategyTag tag) {
  switch (tag) {
    case StrategyTag::truthful: return "truthful";
    case StrategyTag::heuristic: return "heuristic";
    case StrategyTag::permutation: return "permutation";
    case StrategyTag::mixed: return "mixed";
  }
  return "unknown";
}

WorkerStrategy truthful_strategy(int k) {
  return WorkerStrategy::with_effort(StochasticMatrix::identity(k));
}

WorkerStrategy heuristic_strategy(std::vector<double> report_vector) {
  return WorkerStrategy::without_effort(std::move(report_vector));
}

WorkerStrategy uniform_heuristic_strategy(int k) {
  return heuristic_strategy(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

WorkerStrategy permutation_strategy(int k, int shift) {
  const std::size_t n = static_cast<std::size_t>(k);
  shift = ((shift % k) + k) % k;
  if (shift == 0) throw std::invalid_argument("identity shift is the truthful strategy");
  Matrix p(n, n);
  for (std::size_t x = 0; x < n; ++x) p(x, (x + static_cast<std::size_t>(shift)) % n) = 1.0;
  return WorkerStrategy::with_effort(StochasticMatrix(std::move(p)));
}

WorkerStrategy mixed_strategy(int k, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(k);
  Matrix s(n, n);
  for (std::size_t x = 0; x < n; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      s(x, y) = rng.exponential();
      sum += s(x, y);
    }
    for (std::size_t y = 0; y < n; ++y) s(x, y) /= sum;
  }
  return WorkerStrategy::with_effort(StochasticMatrix(std::move(s)));
}

bool tag_matches_strategy(StrategyTag tag, const WorkerStrategy& strategy) {
  switch (tag) {
    case StrategyTag::truthful: {
      if (!strategy.effort()) return false;
      return strategy.report_matrix() == StochasticMatrix::identity(strategy.dim());
    }
    case StrategyTag::heuristic: {
      if (!strategy.effort()) return true;
      // effortful but reporting independent of the observation
      const StochasticMatrix& s = strategy.report_matrix();
      for (int r = 1; r < s.dim(); ++r)
        for (int c = 0; c < s.dim(); ++c)
          if (s(r, c) != s(0, c)) return false;
      return true;
    }
    case StrategyTag::permutation: {
      if (!strategy.effort()) return false;
      const StochasticMatrix& s = strategy.report_matrix();
      if (s == StochasticMatrix::identity(s.dim())) return false;
      std::vector<bool> hit(static_cast<std::size_t>(s.dim()), false);
      for (int r = 0; r < s.dim(); ++r) {
        int ones = 0, target = -1;
        for (int c = 0; c < s.dim(); ++c) {
          if (s(r, c) == 1.0) {
            ++ones;
            target = c;
          } else if (s(r, c) != 0.0) {
            return false;
          }
        }
        if (ones != 1 || hit[static_cast<std::size_t>(target)]) return false;
        hit[static_cast<std::size_t>(target)] = true;
      }
      return true;
    }
    case StrategyTag::mixed: return strategy.effort();
  }
  return false;
}

int GroundTruthTable::label(TaskId task) const {
  const auto it = truths_.find(task);
  if (it == truths_.end()) throw std::invalid_argument("missing ground truth for task");
  return it->second;
}

void GroundTruthTable::ensure(std::span<const TaskId> tasks, const Prior& prior, Rng& rng) {
  for (TaskId t : tasks)
    if (!truths_.count(t)) truths_[t] = rng.categorical(prior.probs());
}

GroundTruthTable sample_ground_truths(std::int64_t n, const Prior& prior, Rng& rng) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  GroundTruthTable table;
  for (TaskId t = 0; t < n; ++t) table.set(t, rng.categorical(prior.probs()));
  return table;
}

namespace {

int answer_one(const WorkerSpec& worker, int g, Rng& rng) {
  if (worker.strategy.effort()) {
    const int observed = rng.categorical(worker.proficiency.row(g));
    return apply_strategy(observed, worker.strategy, rng);
  }
  return apply_strategy(std::nullopt, worker.strategy, rng);
}

}  // namespace

std::vector<TaskAnswer> simulate_submission(const WorkerSpec& worker, const Batch& batch,
                                            const GroundTruthTable& truths, Rng& rng) {
  std::vector<TaskAnswer> answers;
  answers.reserve(batch.shared_tasks.size() + batch.fresh_tasks.size());
  for (TaskId t : batch.shared_tasks)
    answers.push_back({t, answer_one(worker, truths.label(t), rng)});
  for (TaskId t : batch.fresh_tasks)
    answers.push_back({t, answer_one(worker, truths.label(t), rng)});
  return answers;
}

}  // namespace dbt
