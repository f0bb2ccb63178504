#pragma once
// Transitive trust estimation: tally shared-task answer pairs, form the
// empirical conditional/marginal distributions, build the posterior
// coefficient matrix from the peer's known trust, gate on conditioning,
// and solve the linear systems for the unknown trustworthiness matrix.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dbt/matrix.hpp"
#include "dbt/model.hpp"

namespace dbt {

// Raw pair tallies over shared tasks: counts[y_j][y_i] = number of tasks
// where the peer reported y_j and the worker reported y_i.
class JointCounts {
 public:
  JointCounts(Matrix counts, std::int64_t total) : counts_(std::move(counts)), total_(total) {}

  int dim() const { return static_cast<int>(counts_.rows()); }
  std::int64_t total() const { return total_; }
  double at(int y_j, int y_i) const {
    return counts_(static_cast<std::size_t>(y_j), static_cast<std::size_t>(y_i));
  }
  const Matrix& counts() const { return counts_; }

 private:
  Matrix counts_;
  std::int64_t total_;
};

// pairs are (worker_label, peer_label); all labels must lie in [0, k).
JointCounts tally_joint(std::span<const std::pair<int, int>> pairs, int k);

// Conditional omega(Y_i | Y_j) and marginal omega(Y_j) derived from the
// tallies. Conditional rows exist only where the marginal is positive.
struct EmpiricalDistributions {
  Matrix conditional;            // rows outside the support are all-zero placeholders
  std::vector<double> marginal;  // row_total / total
  std::vector<bool> support;     // marginal[y_j] > 0

  bool full_support() const {
    for (bool s : support)
      if (!s) return false;
    return true;
  }
};

EmpiricalDistributions distributions(const JointCounts& counts);

// Posterior coefficient matrix: c[y_j][g] = T_j[g,y_j] * P(g) / omega(y_j),
// i.e. P(G = g | Y_j = y_j) when the marginal matches the model.
struct CoefficientMatrix {
  Matrix c;
  double condition_estimate;
};

// Returns nothing when some marginal entry is zero (system not
// well-defined for that conditioning value).
std::optional<CoefficientMatrix> build_coefficients(const TrustworthinessMatrix& t_peer,
                                                    const Prior& prior,
                                                    std::span<const double> marginal);

// Marginal implied by the model: omega(y) = sum_g T[g,y] * P(g).
std::vector<double> model_marginal(const TrustworthinessMatrix& t, const Prior& prior);

bool is_informative(const CoefficientMatrix& c, double condition_threshold);
inline bool is_informative(const std::optional<CoefficientMatrix>& c,
                           double condition_threshold) {
  return c.has_value() && is_informative(*c, condition_threshold);
}

// Solves c * column_y = conditional[.][y] for every label y, reusing one
// factorization. The raw solution is returned as-is: finite-sample noise
// may push entries outside [0,1]. Returns nothing when the factorization
// is numerically singular.
std::optional<Matrix> solve_trust(const CoefficientMatrix& c, const Matrix& conditional);

// Row-wise Euclidean projection of a raw solution onto the simplex.
StochasticMatrix project_stochastic(const Matrix& raw);

// One-call estimation path shared by the mechanism and the experiment
// drivers: tally -> distributions -> coefficients -> gate -> solve.
enum class MarginalSource { empirical, model };

enum class EstimateError { support_hole, not_well_defined, ill_conditioned, solver_failure };

struct TrustEstimate {
  Matrix raw;
  double condition_estimate;
};

struct EstimateOutcome {
  std::optional<TrustEstimate> estimate;
  std::optional<EstimateError> error;
};

EstimateOutcome estimate_trust(std::span<const std::pair<int, int>> worker_peer_pairs,
                               const TrustworthinessMatrix& peer_trust, const Prior& prior,
                               double condition_threshold,
                               MarginalSource source = MarginalSource::empirical);

}  // namespace dbt
