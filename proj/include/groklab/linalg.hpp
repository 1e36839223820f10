#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace grok {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transpose() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Cholesky factor: lower triangle populated, zeros above, positive diagonal.
class LowerTriangular {
 public:
  LowerTriangular() = default;
  // Takes ownership of a square matrix; entries above the diagonal are zeroed.
  explicit LowerTriangular(Matrix m, double jitter_used = 0.0);

  std::size_t n() const { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  const Matrix& matrix() const { return m_; }
  // Diagonal jitter actually added before factorisation succeeded.
  double jitter_used() const { return jitter_; }

  // L * L^T
  Matrix reconstruct() const;

 private:
  Matrix m_;
  double jitter_ = 0.0;
};

inline constexpr double kDefaultJitter = 1e-6;

// Factor A + jitter*I. On failure with jitter > 0 the jitter is escalated by
// x10 up to `max_escalations` times before NotPositiveDefinite is thrown.
// jitter == 0 means a single exact attempt.
LowerTriangular cholesky(const Matrix& a, double jitter = 0.0, int max_escalations = 3);

// Solves (L L^T) x = b.
Vector solve_chol(const LowerTriangular& l, std::span<const double> b);
// Column-wise solve for a matrix right-hand side.
Matrix solve_chol(const LowerTriangular& l, const Matrix& b);
// L x = b
Vector solve_lower(const LowerTriangular& l, std::span<const double> b);
// L^T x = b
Vector solve_upper_t(const LowerTriangular& l, std::span<const double> b);
// L X = B for every column of B.
Matrix solve_lower(const LowerTriangular& l, const Matrix& b);
// (L L^T)^{-1}, explicitly symmetrised.
Matrix inverse_from_chol(const LowerTriangular& l);
// 2 * sum_i ln L_ii
double logdet(const LowerTriangular& l);

// Data-parallel products. Work is split over output rows and every output
// entry is reduced sequentially, so results are bit-identical to the serial
// reference below whatever the thread count.
Matrix matmul(const Matrix& a, const Matrix& b);     // A B
Matrix matmul_nt(const Matrix& a, const Matrix& b);  // A B^T
Matrix matmul_tn(const Matrix& a, const Matrix& b);  // A^T B
Vector matvec(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm_inf(std::span<const double> a);

namespace serial {
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix matmul_nt(const Matrix& a, const Matrix& b);
Matrix matmul_tn(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, std::span<const double> x);
}  // namespace serial

}  // namespace grok
