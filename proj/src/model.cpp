#include "dbt/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dbt {

AnswerSpace::AnswerSpace(int k_) : k(k_) {
  if (k < 2) throw std::invalid_argument("answer space needs k >= 2");
}

Prior::Prior(std::vector<double> p) : p_(std::move(p)) {
  if (p_.size() < 2) throw std::invalid_argument("prior needs at least 2 labels");
  double sum = 0.0;
  for (double v : p_) {
    if (!(v > 0.0)) throw std::invalid_argument("prior must be fully mixed (all entries > 0)");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance)
    throw std::invalid_argument("prior entries must sum to 1");
}

Prior Prior::uniform(int k) {
  return Prior(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

StochasticMatrix::StochasticMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 2)
    throw std::invalid_argument("stochastic matrix must be square, k >= 2");
  for (std::size_t r = 0; r < entries_.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < entries_.cols(); ++c) {
      const double v = entries_(r, c);
      if (v < -kRowSumTolerance || v > 1.0 + kRowSumTolerance)
        throw std::invalid_argument("stochastic matrix entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance)
      throw std::invalid_argument("stochastic matrix row must sum to 1");
  }
}

WorkerStrategy WorkerStrategy::with_effort(StochasticMatrix report_matrix) {
  WorkerStrategy s;
  s.matrix_ = std::move(report_matrix);
  return s;
}

WorkerStrategy WorkerStrategy::without_effort(std::vector<double> report_vector) {
  if (report_vector.size() < 2) throw std::invalid_argument("report vector needs k >= 2");
  double sum = 0.0;
  for (double v : report_vector) {
    if (v < -kRowSumTolerance || v > 1.0 + kRowSumTolerance)
      throw std::invalid_argument("report vector entry outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance)
    throw std::invalid_argument("report vector must sum to 1");
  WorkerStrategy s;
  s.vector_ = std::move(report_vector);
  return s;
}

int WorkerStrategy::dim() const {
  return effort() ? matrix_->dim() : static_cast<int>(vector_.size());
}

const StochasticMatrix& WorkerStrategy::report_matrix() const {
  if (!effort()) throw std::logic_error("no report matrix without effort");
  return *matrix_;
}

const std::vector<double>& WorkerStrategy::report_vector() const {
  if (effort()) throw std::logic_error("no report vector under effort");
  return vector_;
}

TrustworthinessMatrix compose_trust(const StochasticMatrix& proficiency,
                                    const WorkerStrategy& strategy) {
  if (proficiency.dim() != strategy.dim())
    throw std::invalid_argument("proficiency and strategy dimension mismatch");
  if (strategy.effort())
    return TrustworthinessMatrix(
        multiply(proficiency.entries(), strategy.report_matrix().entries()));
  const std::size_t k = static_cast<std::size_t>(proficiency.dim());
  Matrix t(k, k);
  for (std::size_t g = 0; g < k; ++g)
    for (std::size_t y = 0; y < k; ++y) t(g, y) = strategy.report_vector()[y];
  return TrustworthinessMatrix(std::move(t));
}

double reward_score(const Matrix& t) { return trace(t) - 1.0; }

int apply_strategy(std::optional<int> observed, const WorkerStrategy& strategy, Rng& rng) {
  if (strategy.effort()) {
    if (!observed.has_value())
      throw std::invalid_argument("effortful strategy needs an observed answer");
    if (*observed < 0 || *observed >= strategy.dim())
      throw std::invalid_argument("observed answer out of range");
    return rng.categorical(strategy.report_matrix().row(*observed));
  }
  if (observed.has_value())
    throw std::invalid_argument("effortless strategy takes no observed answer");
  return rng.categorical(strategy.report_vector());
}

}  // namespace dbt
