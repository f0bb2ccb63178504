#pragma once
// Domain types for the answer model: answer space, ground-truth prior,
// row-stochastic matrices (proficiency / reporting / trustworthiness),
// worker strategies, and the algebra connecting them.

#include <optional>
#include <vector>

#include "dbt/matrix.hpp"
#include "dbt/rng.hpp"

namespace dbt {

// Validation tolerance for probability row sums. Inputs outside it are
// rejected, never renormalized.
inline constexpr double kRowSumTolerance = 1e-12;

// Discrete answer space {0, ..., k-1}, k >= 2.
struct AnswerSpace {
  int k;
  explicit AnswerSpace(int k);
};

// Fully mixed prior over ground-truth labels: strictly positive entries
// summing to 1.
class Prior {
 public:
  explicit Prior(std::vector<double> p);
  static Prior uniform(int k);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int g) const { return p_[static_cast<std::size_t>(g)]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

// Right-stochastic square matrix: entries in [0,1], rows sum to 1.
class StochasticMatrix {
 public:
  explicit StochasticMatrix(Matrix entries);
  static StochasticMatrix identity(int k) { return StochasticMatrix(Matrix::identity(k)); }

  int dim() const { return static_cast<int>(entries_.rows()); }
  double operator()(int r, int c) const {
    return entries_(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  }
  const Matrix& entries() const { return entries_; }
  std::span<const double> row(int r) const { return entries_.row(static_cast<std::size_t>(r)); }

  bool operator==(const StochasticMatrix&) const = default;

 private:
  Matrix entries_;
};

// Trustworthiness matrix T: T[g,y] = P(reported answer y | ground truth g).
// Same invariants as any right-stochastic matrix.
using TrustworthinessMatrix = StochasticMatrix;

// A worker's effort bit plus reporting rule: a reporting matrix under
// effort, a reporting vector without it. Exactly one is present.
class WorkerStrategy {
 public:
  static WorkerStrategy with_effort(StochasticMatrix report_matrix);
  static WorkerStrategy without_effort(std::vector<double> report_vector);

  bool effort() const { return matrix_.has_value(); }
  int dim() const;
  const StochasticMatrix& report_matrix() const;
  const std::vector<double>& report_vector() const;

 private:
  WorkerStrategy() = default;
  std::optional<StochasticMatrix> matrix_;
  std::vector<double> vector_;
};

// T = A * S under effort; without effort every row is the reporting vector.
TrustworthinessMatrix compose_trust(const StochasticMatrix& proficiency,
                                    const WorkerStrategy& strategy);

// Reward score trace(T) - 1. Accepts raw (possibly non-stochastic) solver
// output as well; the score is trace-based either way.
double reward_score(const Matrix& t);
inline double reward_score(const StochasticMatrix& t) { return reward_score(t.entries()); }

// Samples a reported label: from row `observed` of the reporting matrix
// under effort, from the reporting vector otherwise. `observed` must be
// present exactly when the strategy invests effort.
int apply_strategy(std::optional<int> observed, const WorkerStrategy& strategy, Rng& rng);

}  // namespace dbt
