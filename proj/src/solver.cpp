#include "dbt/solver.hpp"

#include <stdexcept>

namespace dbt {

JointCounts tally_joint(std::span<const std::pair<int, int>> pairs, int k) {
  if (pairs.empty()) throw std::invalid_argument("no shared-task pairs to tally");
  if (k < 2) throw std::invalid_argument("answer space needs k >= 2");
  Matrix counts(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (const auto& [worker, peer] : pairs) {
    if (worker < 0 || worker >= k || peer < 0 || peer >= k)
      throw std::invalid_argument("label out of range in shared-task pairs");
    counts(static_cast<std::size_t>(peer), static_cast<std::size_t>(worker)) += 1.0;
  }
  return JointCounts(std::move(counts), static_cast<std::int64_t>(pairs.size()));
}

EmpiricalDistributions distributions(const JointCounts& counts) {
  if (counts.total() <= 0) throw std::invalid_argument("empty tally");
  const std::size_t k = static_cast<std::size_t>(counts.dim());
  EmpiricalDistributions d{Matrix(k, k), std::vector<double>(k, 0.0), std::vector<bool>(k, false)};
  const double total = static_cast<double>(counts.total());
  for (std::size_t y_j = 0; y_j < k; ++y_j) {
    double row_total = 0.0;
    for (std::size_t y_i = 0; y_i < k; ++y_i)
      row_total += counts.at(static_cast<int>(y_j), static_cast<int>(y_i));
    d.marginal[y_j] = row_total / total;
    if (row_total > 0.0) {
      d.support[y_j] = true;
      for (std::size_t y_i = 0; y_i < k; ++y_i)
        d.conditional(y_j, y_i) =
            counts.at(static_cast<int>(y_j), static_cast<int>(y_i)) / row_total;
    }
  }
  return d;
}

std::optional<CoefficientMatrix> build_coefficients(const TrustworthinessMatrix& t_peer,
                                                    const Prior& prior,
                                                    std::span<const double> marginal) {
  const int k = t_peer.dim();
  if (prior.size() != k || static_cast<int>(marginal.size()) != k)
    throw std::invalid_argument("dimension mismatch building coefficients");
  Matrix c(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int y_j = 0; y_j < k; ++y_j) {
    if (!(marginal[static_cast<std::size_t>(y_j)] > 0.0)) return std::nullopt;
    for (int g = 0; g < k; ++g)
      c(static_cast<std::size_t>(y_j), static_cast<std::size_t>(g)) =
          t_peer(g, y_j) * prior[g] / marginal[static_cast<std::size_t>(y_j)];
  }
  const double cond = condition_number(c);
  return CoefficientMatrix{std::move(c), cond};
}

std::vector<double> model_marginal(const TrustworthinessMatrix& t, const Prior& prior) {
  const int k = t.dim();
  if (prior.size() != k) throw std::invalid_argument("dimension mismatch");
  std::vector<double> m(static_cast<std::size_t>(k), 0.0);
  for (int y = 0; y < k; ++y)
    for (int g = 0; g < k; ++g) m[static_cast<std::size_t>(y)] += t(g, y) * prior[g];
  return m;
}

bool is_informative(const CoefficientMatrix& c, double condition_threshold) {
  return c.condition_estimate <= condition_threshold;
}

std::optional<Matrix> solve_trust(const CoefficientMatrix& c, const Matrix& conditional) {
  if (conditional.rows() != c.c.rows() || conditional.cols() != c.c.cols())
    throw std::invalid_argument("conditional dimension mismatch");
  LuDecomposition lu(c.c);
  if (lu.singular()) return std::nullopt;
  // Unknowns are T_i[g, y_i]; column y_i solves c * col = conditional[.][y_i].
  return lu.solve(conditional);
}

StochasticMatrix project_stochastic(const Matrix& raw) {
  Matrix out(raw.rows(), raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    const std::vector<double> p = project_to_simplex(raw.row(r));
    for (std::size_t c = 0; c < raw.cols(); ++c) out(r, c) = p[c];
  }
  return StochasticMatrix(std::move(out));
}

EstimateOutcome estimate_trust(std::span<const std::pair<int, int>> worker_peer_pairs,
                               const TrustworthinessMatrix& peer_trust, const Prior& prior,
                               double condition_threshold, MarginalSource source) {
  const JointCounts counts = tally_joint(worker_peer_pairs, peer_trust.dim());
  const EmpiricalDistributions dist = distributions(counts);
  if (!dist.full_support()) return {std::nullopt, EstimateError::support_hole};

  const std::vector<double> marginal = source == MarginalSource::empirical
                                           ? dist.marginal
                                           : model_marginal(peer_trust, prior);
  const std::optional<CoefficientMatrix> coeff = build_coefficients(peer_trust, prior, marginal);
  if (!coeff) return {std::nullopt, EstimateError::not_well_defined};
  if (!is_informative(*coeff, condition_threshold))
    return {std::nullopt, EstimateError::ill_conditioned};

  std::optional<Matrix> raw = solve_trust(*coeff, dist.conditional);
  if (!raw) return {std::nullopt, EstimateError::solver_failure};
  return {TrustEstimate{std::move(*raw), coeff->condition_estimate}, std::nullopt};
}

}  // namespace dbt
