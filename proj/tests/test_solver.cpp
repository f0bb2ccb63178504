#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dbt/solver.hpp"
#include "support.hpp"

using namespace dbt;

namespace {

// Random peer trust whose coefficient matrix is comfortably conditioned.
TrustworthinessMatrix random_informative_peer(int k, const Prior& prior, Rng& rng,
                                              double max_condition = 1e3) {
  while (true) {
    const StochasticMatrix t = testing::random_stochastic(k, rng);
    const std::vector<double> marginal = model_marginal(t, prior);
    bool positive = true;
    for (double m : marginal)
      if (!(m > 0.0)) positive = false;
    if (!positive) continue;
    const auto c = build_coefficients(t, prior, marginal);
    if (c && c->condition_estimate <= max_condition) return t;
  }
}

}  // namespace

TEST_CASE("tally_joint counts peer-major") {
  SUBCASE("diagonal pairs") {
    const std::vector<std::pair<int, int>> pairs{{0, 0}, {1, 1}};
    const JointCounts counts = tally_joint(pairs, 2);
    CHECK(counts.at(0, 0) == 1);
    CHECK(counts.at(0, 1) == 0);
    CHECK(counts.at(1, 0) == 0);
    CHECK(counts.at(1, 1) == 1);
    CHECK(counts.total() == 2);
  }
  SUBCASE("asymmetric pairs") {
    const std::vector<std::pair<int, int>> pairs{{0, 0}, {0, 0}, {1, 0}, {1, 1}};
    const JointCounts counts = tally_joint(pairs, 2);
    CHECK(counts.at(0, 0) == 2);
    CHECK(counts.at(0, 1) == 1);
    CHECK(counts.at(1, 0) == 0);
    CHECK(counts.at(1, 1) == 1);
  }
  SUBCASE("eight pairs fill both rows") {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < 3; ++i) pairs.push_back({0, 0});
    pairs.push_back({1, 0});
    pairs.push_back({0, 1});
    for (int i = 0; i < 3; ++i) pairs.push_back({1, 1});
    const JointCounts counts = tally_joint(pairs, 2);
    CHECK(counts.at(0, 0) == 3);
    CHECK(counts.at(0, 1) == 1);
    CHECK(counts.at(1, 0) == 1);
    CHECK(counts.at(1, 1) == 3);
  }
  SUBCASE("rejected input") {
    CHECK_THROWS_AS(tally_joint({}, 2), std::invalid_argument);
    const std::vector<std::pair<int, int>> bad{{0, 2}};
    CHECK_THROWS_AS(tally_joint(bad, 2), std::invalid_argument);
  }
}

TEST_CASE("distributions normalize rows and flag support") {
  SUBCASE("direct normalization") {
    const JointCounts counts(Matrix::from_rows({{3, 1}, {1, 3}}), 8);
    const EmpiricalDistributions d = distributions(counts);
    CHECK(d.marginal[0] == doctest::Approx(0.5));
    CHECK(d.marginal[1] == doctest::Approx(0.5));
    CHECK(d.conditional(0, 0) == doctest::Approx(0.75));
    CHECK(d.conditional(0, 1) == doctest::Approx(0.25));
    CHECK(d.conditional(1, 0) == doctest::Approx(0.25));
    CHECK(d.conditional(1, 1) == doctest::Approx(0.75));
    CHECK(d.full_support());
  }
  SUBCASE("empty row leaves the support") {
    const JointCounts counts(Matrix::from_rows({{4, 0}, {0, 0}}), 4);
    const EmpiricalDistributions d = distributions(counts);
    CHECK(d.marginal[0] == doctest::Approx(1.0));
    CHECK(d.marginal[1] == doctest::Approx(0.0));
    CHECK(d.support[0]);
    CHECK_FALSE(d.support[1]);
    CHECK_FALSE(d.full_support());
  }
  SUBCASE("symmetric counts") {
    const JointCounts counts(Matrix::from_rows({{2, 2}, {2, 2}}), 8);
    const EmpiricalDistributions d = distributions(counts);
    CHECK(d.marginal[0] == doctest::Approx(0.5));
    CHECK(d.conditional(0, 0) == doctest::Approx(0.5));
    CHECK(d.conditional(1, 1) == doctest::Approx(0.5));
  }
}

TEST_CASE("build_coefficients forms the posterior matrix") {
  SUBCASE("oracle peer with uniform prior gives the identity") {
    const auto c = build_coefficients(StochasticMatrix::identity(2), Prior::uniform(2),
                                      std::vector<double>{0.5, 0.5});
    REQUIRE(c.has_value());
    CHECK(max_abs_diff(c->c, Matrix::identity(2)) < 1e-15);
  }
  SUBCASE("general peer matches the direct evaluation") {
    const TrustworthinessMatrix t_peer(Matrix::from_rows({{0.9, 0.1}, {0.2, 0.8}}));
    const Prior prior({0.6, 0.4});
    const std::vector<double> marginal = model_marginal(t_peer, prior);
    CHECK(marginal[0] == doctest::Approx(0.62).epsilon(1e-12));
    CHECK(marginal[1] == doctest::Approx(0.38).epsilon(1e-12));
    const auto c = build_coefficients(t_peer, prior, marginal);
    REQUIRE(c.has_value());
    CHECK(c->c(0, 0) == doctest::Approx(0.870968).epsilon(1e-5));
    CHECK(c->c(0, 1) == doctest::Approx(0.129032).epsilon(1e-5));
    CHECK(c->c(1, 0) == doctest::Approx(0.157895).epsilon(1e-5));
    CHECK(c->c(1, 1) == doctest::Approx(0.842105).epsilon(1e-5));
    // exact against the definition
    CHECK(c->c(0, 0) == doctest::Approx(0.9 * 0.6 / 0.62).epsilon(1e-14));
  }
  SUBCASE("heuristic peer collapses every row to the prior") {
    const TrustworthinessMatrix t_peer(Matrix::from_rows({{0.7, 0.3}, {0.7, 0.3}}));
    const Prior prior({0.5, 0.5});
    const auto c = build_coefficients(t_peer, prior, std::vector<double>{0.7, 0.3});
    REQUIRE(c.has_value());
    for (int r = 0; r < 2; ++r)
      for (int col = 0; col < 2; ++col)
        CHECK(c->c(static_cast<std::size_t>(r), static_cast<std::size_t>(col)) ==
              doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("zero marginal is not well-defined") {
    const auto c = build_coefficients(StochasticMatrix::identity(2), Prior::uniform(2),
                                      std::vector<double>{1.0, 0.0});
    CHECK_FALSE(c.has_value());
  }
}

TEST_CASE("is_informative gates on the condition estimate") {
  CHECK(is_informative(CoefficientMatrix{Matrix::identity(2), 1.0}, 1e6));
  // two identical rows: rank deficient
  const Matrix flat = Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  CHECK_FALSE(is_informative(CoefficientMatrix{flat, condition_number(flat)}, 1e6));
  // condition number 25 vs threshold 20, cross-checked with the oracle
  const Matrix near = Matrix::from_rows({{0.52, 0.48}, {0.48, 0.52}});
  const double oracle_kappa = dbt::testing::oracle_condition_number(near);
  CHECK(oracle_kappa == doctest::Approx(25.0).epsilon(1e-6));
  CHECK_FALSE(is_informative(CoefficientMatrix{near, condition_number(near)}, 20.0));
  CHECK(is_informative(CoefficientMatrix{near, condition_number(near)}, 30.0));
  // missing coefficients are never informative
  CHECK_FALSE(is_informative(std::nullopt, 1e6));
}

TEST_CASE("solve_trust inverts the forward model") {
  SUBCASE("identity coefficients hand back the conditional") {
    const CoefficientMatrix c{Matrix::identity(2), 1.0};
    const Matrix conditional = Matrix::from_rows({{0.8, 0.2}, {0.3, 0.7}});
    const auto raw = solve_trust(c, conditional);
    REQUIRE(raw.has_value());
    CHECK(max_abs_diff(*raw, conditional) < 1e-14);
  }
  SUBCASE("round trip through the spec instance") {
    const TrustworthinessMatrix t_worker(Matrix::from_rows({{0.8, 0.2}, {0.3, 0.7}}));
    const TrustworthinessMatrix t_peer(Matrix::from_rows({{0.9, 0.1}, {0.2, 0.8}}));
    const Prior prior({0.6, 0.4});
    const auto fwd = testing::forward_distributions(t_worker, t_peer, prior);
    CHECK(fwd.conditional(0, 0) == doctest::Approx(0.735484).epsilon(1e-5));
    CHECK(fwd.conditional(0, 1) == doctest::Approx(0.264516).epsilon(1e-5));
    CHECK(fwd.conditional(1, 0) == doctest::Approx(0.378947).epsilon(1e-5));
    CHECK(fwd.conditional(1, 1) == doctest::Approx(0.621053).epsilon(1e-5));
    const auto c = build_coefficients(t_peer, prior, fwd.marginal);
    REQUIRE(c.has_value());
    const auto raw = solve_trust(*c, fwd.conditional);
    REQUIRE(raw.has_value());
    CHECK(max_abs_diff(*raw, t_worker.entries()) < 1e-9);
  }
  SUBCASE("heuristic conditional rows solve to identical rows and zero score") {
    Rng rng(31);
    for (int it = 0; it < 50; ++it) {
      const int k = 2 + rng.uniform_int(3);
      const Prior prior = testing::random_prior(k, rng);
      const TrustworthinessMatrix t_peer = random_informative_peer(k, prior, rng);
      const std::vector<double> s = testing::random_simplex_point(k, rng);
      Matrix rows(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
      for (int g = 0; g < k; ++g)
        for (int y = 0; y < k; ++y)
          rows(static_cast<std::size_t>(g), static_cast<std::size_t>(y)) =
              s[static_cast<std::size_t>(y)];
      const TrustworthinessMatrix t_heur(rows);
      const auto fwd = testing::forward_distributions(t_heur, t_peer, prior);
      const auto c = build_coefficients(t_peer, prior, fwd.marginal);
      REQUIRE(c.has_value());
      const auto raw = solve_trust(*c, fwd.conditional);
      REQUIRE(raw.has_value());
      CHECK(max_abs_diff(*raw, rows) < 1e-9);
      CHECK(std::abs(reward_score(*raw)) < 1e-9);
    }
  }
}

TEST_CASE("project_stochastic repairs raw solutions row-wise") {
  const Matrix valid = Matrix::from_rows({{0.8, 0.2}, {0.3, 0.7}});
  CHECK(max_abs_diff(project_stochastic(valid).entries(), valid) < 1e-15);
  const Matrix out_of_range = Matrix::from_rows({{1.05, -0.05}, {0.6, 0.6}});
  const StochasticMatrix fixed = project_stochastic(out_of_range);
  CHECK(fixed(0, 0) == doctest::Approx(1.0));
  CHECK(fixed(0, 1) == doctest::Approx(0.0));
  CHECK(fixed(1, 0) == doctest::Approx(0.5));
  CHECK(fixed(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("exact recovery over 1000 random instances") {
  Rng rng(37);
  for (int it = 0; it < 1000; ++it) {
    const int k = 2 + rng.uniform_int(3);
    const Prior prior = testing::random_prior(k, rng);
    const TrustworthinessMatrix t_peer = random_informative_peer(k, prior, rng);
    const TrustworthinessMatrix t_worker = testing::random_stochastic(k, rng);
    const auto fwd = testing::forward_distributions(t_worker, t_peer, prior);
    const auto c = build_coefficients(t_peer, prior, fwd.marginal);
    REQUIRE(c.has_value());
    const auto raw = solve_trust(*c, fwd.conditional);
    REQUIRE(raw.has_value());
    CHECK(max_abs_diff(*raw, t_worker.entries()) <= 1e-9);
  }
}

TEST_CASE("sampled estimates tighten as shared tasks grow") {
  const TrustworthinessMatrix t_worker(Matrix::from_rows({{0.8, 0.2}, {0.3, 0.7}}));
  const TrustworthinessMatrix t_peer(Matrix::from_rows({{0.9, 0.1}, {0.2, 0.8}}));
  const Prior prior({0.5, 0.5});
  const int sizes[] = {1000, 10000, 100000};
  std::vector<std::vector<double>> errors(3);
  for (int seed = 0; seed < 50; ++seed) {
    Rng rng = Rng::derive(41, static_cast<std::uint64_t>(seed));
    for (int si = 0; si < 3; ++si) {
      std::vector<std::pair<int, int>> pairs(static_cast<std::size_t>(sizes[si]));
      for (auto& [worker, peer] : pairs) {
        const int g = rng.categorical(prior.probs());
        worker = rng.categorical(t_worker.row(g));
        peer = rng.categorical(t_peer.row(g));
      }
      const EstimateOutcome out = estimate_trust(pairs, t_peer, prior, 1e6);
      REQUIRE(out.estimate.has_value());
      errors[static_cast<std::size_t>(si)].push_back(
          max_abs_diff(out.estimate->raw, t_worker.entries()));
    }
  }
  const auto median = [](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    return xs[xs.size() / 2];
  };
  const double m0 = median(errors[0]), m1 = median(errors[1]), m2 = median(errors[2]);
  CHECK(m0 >= m1);
  CHECK(m1 >= m2);
}

TEST_CASE("heuristic peers are always rejected") {
  Rng rng(43);
  for (int it = 0; it < 200; ++it) {
    const int k = 2 + rng.uniform_int(3);
    const Prior prior = testing::random_prior(k, rng);
    const std::vector<double> s = testing::random_simplex_point(k, rng, 1e-3);
    Matrix rows(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (int g = 0; g < k; ++g)
      for (int y = 0; y < k; ++y)
        rows(static_cast<std::size_t>(g), static_cast<std::size_t>(y)) =
            s[static_cast<std::size_t>(y)];
    const TrustworthinessMatrix t_heur(rows);
    const auto c = build_coefficients(t_heur, prior, model_marginal(t_heur, prior));
    CHECK_FALSE(is_informative(c, 1e6));
    if (c.has_value()) {
      // rows of the posterior all equal the prior
      for (int r = 0; r < k; ++r)
        for (int g = 0; g < k; ++g)
          CHECK(c->c(static_cast<std::size_t>(r), static_cast<std::size_t>(g)) ==
                doctest::Approx(prior[g]).epsilon(1e-9));
    }
  }
}

TEST_CASE("binary peers are informative whenever the trace margin holds") {
  Rng rng(47);
  for (int it = 0; it < 500; ++it) {
    const Prior prior = testing::random_prior(2, rng, 0.2);
    const StochasticMatrix t = testing::random_stochastic(2, rng);
    if (std::abs(t(0, 0) + t(1, 1) - 1.0) < 0.05) continue;
    const auto c = build_coefficients(t, prior, model_marginal(t, prior));
    REQUIRE(c.has_value());
    CHECK(is_informative(*c, 1e4));
  }
}

TEST_CASE("estimate_trust reports support holes") {
  // peer answered only label 0 on the shared tasks
  const std::vector<std::pair<int, int>> pairs{{0, 0}, {1, 0}, {0, 0}};
  const EstimateOutcome out =
      estimate_trust(pairs, StochasticMatrix::identity(2), Prior::uniform(2), 1e6);
  CHECK_FALSE(out.estimate.has_value());
  CHECK(out.error == EstimateError::support_hole);
}
