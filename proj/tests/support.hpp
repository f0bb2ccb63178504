#pragma once
// Test-only oracles, kept independent of the implementation paths they
// check: exact forward generation of the shared-task distributions from
// known trust matrices, a power-iteration condition number, a bisection
// simplex projection, and random instance generators.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dbt/matrix.hpp"
#include "dbt/model.hpp"
#include "dbt/rng.hpp"

namespace dbt::testing {

// Exact-limit distributions of (worker answer, peer answer) on shared
// tasks: marginal(y_j) = sum_g T_j[g,y_j] P(g) and
// conditional[y_j][y_i] = sum_g T_i[g,y_i] T_j[g,y_j] P(g) / marginal(y_j).
struct ForwardDistributions {
  Matrix conditional;
  std::vector<double> marginal;
};

inline ForwardDistributions forward_distributions(const StochasticMatrix& t_worker,
                                                  const StochasticMatrix& t_peer,
                                                  const Prior& prior) {
  const int k = t_worker.dim();
  ForwardDistributions out{Matrix(static_cast<std::size_t>(k), static_cast<std::size_t>(k)),
                           std::vector<double>(static_cast<std::size_t>(k), 0.0)};
  for (int y_j = 0; y_j < k; ++y_j) {
    for (int g = 0; g < k; ++g) out.marginal[y_j] += t_peer(g, y_j) * prior[g];
    for (int y_i = 0; y_i < k; ++y_i) {
      double joint = 0.0;
      for (int g = 0; g < k; ++g) joint += t_worker(g, y_i) * t_peer(g, y_j) * prior[g];
      out.conditional(y_j, y_i) = joint / out.marginal[y_j];
    }
  }
  return out;
}

// Condition number via power iteration on A^T A (largest eigenvalue) and
// inverse iteration through an LU solve (smallest).
inline double oracle_condition_number(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix ata = multiply(transpose(a), a);
  std::vector<double> v(n, 1.0);
  double lambda_max = 0.0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i] += ata(i, j) * v[j];
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
    lambda_max = norm;
  }
  LuDecomposition lu(ata);
  if (lu.singular()) return std::numeric_limits<double>::infinity();
  std::vector<double> u(n, 1.0);
  double inv_lambda_min = 0.0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> w = lu.solve(u);
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) u[i] = w[i] / norm;
    inv_lambda_min = norm;
  }
  return std::sqrt(lambda_max * inv_lambda_min);
}

// Simplex projection by bisection on the shift theta solving
// sum_i max(v_i - theta, 0) = 1.
inline std::vector<double> oracle_project_simplex(const std::vector<double>& v) {
  double lo = *std::min_element(v.begin(), v.end()) - 1.0;
  double hi = *std::max_element(v.begin(), v.end());
  const auto mass = [&](double theta) {
    double m = 0.0;
    for (double x : v) m += std::max(x - theta, 0.0);
    return m;
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
  }
  const double theta = 0.5 * (lo + hi);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

// Random generators for property tests.

inline std::vector<double> random_simplex_point(int k, Rng& rng, double floor = 0.0) {
  std::vector<double> p(static_cast<std::size_t>(k));
  while (true) {
    double sum = 0.0;
    for (double& x : p) {
      x = rng.exponential();
      sum += x;
    }
    bool ok = true;
    for (double& x : p) {
      x /= sum;
      if (x < floor) ok = false;
    }
    if (ok) return p;
  }
}

inline StochasticMatrix random_stochastic(int k, Rng& rng, double floor = 0.0) {
  Matrix m(static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  for (int r = 0; r < k; ++r) {
    const std::vector<double> row = random_simplex_point(k, rng, floor);
    for (int c = 0; c < k; ++c)
      m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = row[static_cast<std::size_t>(c)];
  }
  return StochasticMatrix(std::move(m));
}

inline Prior random_prior(int k, Rng& rng, double floor = 0.05) {
  std::vector<double> p = random_simplex_point(k, rng, floor);
  // renormalize the floating-point dust so the Prior tolerance is met
  double sum = 0.0;
  for (double x : p) sum += x;
  for (double& x : p) x /= sum;
  return Prior(std::move(p));
}

// Column-diagonally-dominant stochastic matrix: A[g,g] > A[g',g] + margin.
inline StochasticMatrix random_dominant_matrix(int k, Rng& rng, double margin = 0.1) {
  while (true) {
    StochasticMatrix a = random_stochastic(k, rng);
    Matrix m = a.entries();
    for (int g = 0; g < k; ++g) {
      // push mass toward the diagonal
      const std::size_t gg = static_cast<std::size_t>(g);
      const double boost = 0.5 + 0.5 * rng.uniform();
      for (int c = 0; c < k; ++c)
        m(gg, static_cast<std::size_t>(c)) *= (1.0 - boost);
      m(gg, gg) += boost;
    }
    StochasticMatrix cand(m);
    bool ok = true;
    for (int g = 0; g < k && ok; ++g)
      for (int gp = 0; gp < k; ++gp)
        if (gp != g && !(cand(g, g) > cand(gp, g) + margin)) {
          ok = false;
          break;
        }
    if (ok) return cand;
  }
}

inline double max_abs_row_sum_error(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) sum += m(r, c);
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

}  // namespace dbt::testing
