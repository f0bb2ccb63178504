#include <doctest.h>

#include <cmath>
#include <limits>

#include "dbt/matrix.hpp"
#include "dbt/rng.hpp"
#include "support.hpp"

using namespace dbt;

TEST_CASE("lu solves small systems exactly") {
  // 2x2 against Cramer's rule
  Matrix a = Matrix::from_rows({{3.0, 1.0}, {1.0, 2.0}});
  LuDecomposition lu(a);
  REQUIRE_FALSE(lu.singular());
  const std::vector<double> rhs{5.0, 5.0};
  const std::vector<double> x = lu.solve(rhs);
  const double det = 3.0 * 2.0 - 1.0 * 1.0;
  CHECK(x[0] == doctest::Approx((5.0 * 2.0 - 1.0 * 5.0) / det).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx((3.0 * 5.0 - 5.0 * 1.0) / det).epsilon(1e-14));
}

TEST_CASE("lu multi-rhs reuses the factorization") {
  Matrix a = Matrix::from_rows({{2.0, 0.0, 1.0}, {0.0, 3.0, 0.0}, {1.0, 0.0, 2.0}});
  Matrix b = Matrix::from_rows({{1.0, 0.0}, {0.0, 3.0}, {1.0, 0.0}});
  LuDecomposition lu(a);
  Matrix x = lu.solve(b);
  Matrix ax = multiply(a, x);
  CHECK(max_abs_diff(ax, b) < 1e-13);
}

TEST_CASE("lu flags singular matrices") {
  Matrix a = Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}});
  CHECK(LuDecomposition(a).singular());
}

TEST_CASE("lu residuals stay tiny on random systems") {
  Rng rng(7);
  for (int it = 0; it < 200; ++it) {
    const int k = 2 + rng.uniform_int(4);
    Matrix a(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    std::vector<double> rhs(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
      rhs[static_cast<std::size_t>(r)] = rng.uniform() * 2.0 - 1.0;
      for (int c = 0; c < k; ++c)
        a(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = rng.uniform() * 2.0 - 1.0;
    }
    LuDecomposition lu(a);
    if (lu.singular()) continue;
    const std::vector<double> x = lu.solve(rhs);
    for (int r = 0; r < k; ++r) {
      double acc = 0.0;
      for (int c = 0; c < k; ++c)
        acc += a(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) *
               x[static_cast<std::size_t>(c)];
      CHECK(std::abs(acc - rhs[static_cast<std::size_t>(r)]) < 1e-9);
    }
  }
}

TEST_CASE("condition number of the identity is 1") {
  CHECK(condition_number(Matrix::identity(3)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("condition number matches the analytic symmetric case") {
  // eigenvalues 1 and 0.04, ratio 25
  Matrix a = Matrix::from_rows({{0.52, 0.48}, {0.48, 0.52}});
  CHECK(condition_number(a) == doctest::Approx(25.0).epsilon(1e-9));
}

TEST_CASE("condition number is infinite for rank-deficient input") {
  Matrix a = Matrix::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  CHECK(std::isinf(condition_number(a)));
}

TEST_CASE("condition number agrees with the power-iteration oracle") {
  Rng rng(11);
  for (int it = 0; it < 100; ++it) {
    const int k = 2 + rng.uniform_int(3);
    Matrix a(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c)
        a(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = rng.uniform();
    const double mine = condition_number(a);
    const double oracle = testing::oracle_condition_number(a);
    if (std::isinf(mine) || std::isinf(oracle)) continue;
    CHECK(mine == doctest::Approx(oracle).epsilon(1e-6));
  }
}

TEST_CASE("simplex projection known points") {
  const std::vector<double> unchanged{0.8, 0.2};
  CHECK(project_to_simplex(unchanged) == unchanged);

  const std::vector<double> clamped = project_to_simplex(std::vector<double>{1.05, -0.05});
  CHECK(clamped[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(clamped[1] == doctest::Approx(0.0).epsilon(1e-15));

  const std::vector<double> split = project_to_simplex(std::vector<double>{0.6, 0.6});
  CHECK(split[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(split[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("simplex projection matches the bisection oracle and is optimal") {
  Rng rng(13);
  for (int it = 0; it < 300; ++it) {
    const int k = 2 + rng.uniform_int(5);
    std::vector<double> v(static_cast<std::size_t>(k));
    for (double& x : v) x = rng.uniform() * 4.0 - 2.0;
    const std::vector<double> mine = project_to_simplex(v);
    const std::vector<double> oracle = testing::oracle_project_simplex(v);

    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(mine[i] >= 0.0);
      CHECK(std::abs(mine[i] - oracle[i]) < 1e-9);
      sum += mine[i];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    // no random simplex point is closer to v
    const std::vector<double> z = testing::random_simplex_point(k, rng);
    double d_mine = 0.0, d_z = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      d_mine += (v[i] - mine[i]) * (v[i] - mine[i]);
      d_z += (v[i] - z[i]) * (v[i] - z[i]);
    }
    CHECK(d_mine <= d_z + 1e-12);

    // idempotent
    const std::vector<double> twice = project_to_simplex(mine);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::abs(twice[i] - mine[i]) < 1e-12);
  }
}
