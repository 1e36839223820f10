#include "groklab/linalg.hpp"

#include <cmath>
#include <string>

#include "groklab/errors.hpp"

namespace grok {

namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 15;

void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_, "Matrix: data length != rows*cols");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

LowerTriangular::LowerTriangular(Matrix m, double jitter_used) : m_(std::move(m)), jitter_(jitter_used) {
  require(m_.rows() == m_.cols(), "LowerTriangular: matrix not square");
  for (std::size_t i = 0; i < m_.rows(); ++i)
    for (std::size_t j = i + 1; j < m_.cols(); ++j) m_(i, j) = 0.0;
}

Matrix LowerTriangular::reconstruct() const { return matmul_nt(m_, m_); }

namespace {

// Cholesky-Banachiewicz; returns false on a non-positive pivot.
bool try_cholesky(const Matrix& a, double jitter, Matrix& l) {
  const std::size_t n = a.rows();
  l = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a(i, j);
      if (i == j) s += jitter;
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) return false;
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return true;
}

}  // namespace

LowerTriangular cholesky(const Matrix& a, double jitter, int max_escalations) {
  require(a.rows() == a.cols(), "cholesky: matrix not square");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(a(j, i))});
      if (std::abs(a(i, j) - a(j, i)) > 1e-9 * scale)
        throw InvalidArgument("cholesky: matrix not symmetric");
    }

  Matrix l;
  double j = jitter;
  const int attempts = jitter > 0.0 ? max_escalations + 1 : 1;
  for (int attempt = 0; attempt < attempts; ++attempt, j *= 10.0) {
    if (try_cholesky(a, j, l)) return LowerTriangular(std::move(l), j);
  }
  throw NotPositiveDefinite("cholesky: non-positive pivot (last jitter " + std::to_string(j / 10.0) + ")");
}

Vector solve_lower(const LowerTriangular& l, std::span<const double> b) {
  const std::size_t n = l.n();
  require(b.size() == n, "solve_lower: rhs length mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  return x;
}

Vector solve_upper_t(const LowerTriangular& l, std::span<const double> b) {
  const std::size_t n = l.n();
  require(b.size() == n, "solve_upper_t: rhs length mismatch");
  Vector x(b.begin(), b.end());
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

Vector solve_chol(const LowerTriangular& l, std::span<const double> b) {
  require(b.size() == l.n(), "solve_chol: rhs length mismatch");
  return solve_upper_t(l, solve_lower(l, b));
}

Matrix solve_lower(const LowerTriangular& l, const Matrix& b) {
  const std::size_t n = l.n();
  require(b.rows() == n, "solve_lower: rhs rows mismatch");
  Matrix x = b;
  const std::size_t m = b.cols();
  // Row-oriented forward substitution over all columns at once.
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t c = 0; c < m; ++c) xi[c] -= lik * xk[c];
    }
    const double d = l(i, i);
    for (std::size_t c = 0; c < m; ++c) xi[c] /= d;
  }
  return x;
}

Matrix solve_chol(const LowerTriangular& l, const Matrix& b) {
  Matrix y = solve_lower(l, b);
  const std::size_t n = l.n();
  const std::size_t m = b.cols();
  for (std::size_t ii = n; ii-- > 0;) {
    auto yi = y.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double lki = l(k, ii);
      if (lki == 0.0) continue;
      auto yk = y.row(k);
      for (std::size_t c = 0; c < m; ++c) yi[c] -= lki * yk[c];
    }
    const double d = l(ii, ii);
    for (std::size_t c = 0; c < m; ++c) yi[c] /= d;
  }
  return y;
}

Matrix inverse_from_chol(const LowerTriangular& l) {
  Matrix inv = solve_chol(l, Matrix::identity(l.n()));
  const std::size_t n = inv.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

double logdet(const LowerTriangular& l) {
  double s = 0.0;
  for (std::size_t i = 0; i < l.n(); ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimension mismatch");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Matrix out(n, m);
  const long long rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (n * k * m > kParallelWork)
  for (long long i = 0; i < rows; ++i) {
    auto o = out.row(static_cast<std::size_t>(i));
    auto ai = a.row(static_cast<std::size_t>(i));
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = ai[p];
      auto bp = b.row(p);
      for (std::size_t j = 0; j < m; ++j) o[j] += aip * bp[j];
    }
  }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: inner dimension mismatch");
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  Matrix out(n, m);
  const long long rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (n * k * m > kParallelWork)
  for (long long i = 0; i < rows; ++i) {
    auto ai = a.row(static_cast<std::size_t>(i));
    auto o = out.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < m; ++j) {
      auto bj = b.row(j);
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      o[j] = s;
    }
  }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: inner dimension mismatch");
  const std::size_t n = a.cols(), k = a.rows(), m = b.cols();
  Matrix out(n, m);
  const long long rows = static_cast<long long>(n);
#pragma omp parallel for schedule(static) if (n * k * m > kParallelWork)
  for (long long i = 0; i < rows; ++i) {
    auto o = out.row(static_cast<std::size_t>(i));
    for (std::size_t p = 0; p < k; ++p) {
      const double api = a(p, static_cast<std::size_t>(i));
      if (api == 0.0) continue;
      auto bp = b.row(p);
      for (std::size_t j = 0; j < m; ++j) o[j] += api * bp[j];
    }
  }
  return out;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "matvec: dimension mismatch");
  Vector out(a.rows());
  const long long rows = static_cast<long long>(a.rows());
#pragma omp parallel for schedule(static) if (a.rows() * a.cols() > kParallelWork)
  for (long long i = 0; i < rows; ++i) {
    auto ai = a.row(static_cast<std::size_t>(i));
    double s = 0.0;
    for (std::size_t p = 0; p < ai.size(); ++p) s += ai[p] * x[p];
    out[static_cast<std::size_t>(i)] = s;
  }
  return out;
}

namespace serial {

// Naive triple loops. Each output entry accumulates over the inner index in
// ascending order, the same order the parallel kernels use.
Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimension mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
      out(i, j) = s;
    }
  return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: inner dimension mismatch");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * b(j, p);
      out(i, j) = s;
    }
  return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: inner dimension mismatch");
  Matrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.cols(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < a.rows(); ++p) {
        if (a(p, i) == 0.0) continue;
        s += a(p, i) * b(p, j);
      }
      out(i, j) = s;
    }
  return out;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "matvec: dimension mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t p = 0; p < a.cols(); ++p) s += a(i, p) * x[p];
    out[i] = s;
  }
  return out;
}

}  // namespace serial

}  // namespace grok
