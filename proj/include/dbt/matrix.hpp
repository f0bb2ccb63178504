#pragma once
// Small dense matrix kit sized for tiny answer spaces (k <= ~10):
// row-major storage, LU with partial pivoting, spectral condition
// number, Euclidean simplex projection.

#include <cstddef>
#include <span>
#include <vector>

namespace dbt {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
double trace(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// LU factorization with partial pivoting. Factors once, solves many
// right-hand sides against the same coefficient matrix.
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix a);

  bool singular() const { return singular_; }

  // Solves A x = rhs. Undefined when singular().
  std::vector<double> solve(std::span<const double> rhs) const;

  // Solves A X = B column by column, reusing the factorization.
  Matrix solve(const Matrix& b) const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

// Spectral (2-norm) condition number: ratio of extreme singular values,
// computed by Jacobi iteration on A^T A. Returns +infinity when the
// matrix is numerically rank deficient.
double condition_number(const Matrix& a);

// Euclidean projection onto the probability simplex (sort-based pivot
// search). A point already on the simplex comes back unchanged.
std::vector<double> project_to_simplex(std::span<const double> v);

}  // namespace dbt
