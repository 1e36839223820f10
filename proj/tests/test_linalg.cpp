#include <doctest.h>

#include <cmath>

#include <omp.h>

#include "groklab/errors.hpp"
#include "groklab/linalg.hpp"
#include "groklab/prng.hpp"

using namespace grok;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Stream& s) {
  Matrix m(r, c);
  for (double& v : m.data()) v = s.standard_normal();
  return m;
}

// M^T M + I
Matrix random_spd(std::size_t n, Stream& s) {
  const Matrix m = random_matrix(n, n, s);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = i == j ? 1.0 : 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += m(k, i) * m(k, j);
      a(i, j) = acc;
    }
  return a;
}

double frob_rel(const Matrix& a, const Matrix& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    num += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    den += b.data()[i] * b.data()[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("cholesky worked examples") {
  const LowerTriangular i3 = cholesky(Matrix::identity(3));
  CHECK(i3.matrix() == Matrix::identity(3));

  const Matrix a{{4.0, 2.0}, {2.0, 3.0}};
  const LowerTriangular l = cholesky(a);
  CHECK(l(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(l(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(l(0, 1) == 0.0);
  CHECK(frob_rel(l.reconstruct(), a) <= 1e-12);

  CHECK_THROWS_AS(cholesky(Matrix{{1.0, 2.0}, {2.0, 1.0}}), NotPositiveDefinite);
}

TEST_CASE("cholesky jitter escalation") {
  // Singular PSD matrix: fails exactly, succeeds once jitter is added.
  const Matrix a{{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(cholesky(a, 0.0), NotPositiveDefinite);
  const LowerTriangular l = cholesky(a, 1e-6);
  CHECK(l.jitter_used() == doctest::Approx(1e-6));
  // Indefinite beyond the reach of three escalations (1e-6 .. 1e-3).
  CHECK_THROWS_AS(cholesky(Matrix{{1.0, 0.0}, {0.0, -0.5}}, 1e-6, 3), NotPositiveDefinite);
  // Needs 1e-2 > 1e-3: one more escalation than allowed.
  CHECK_THROWS_AS(cholesky(Matrix{{1.0, 0.0}, {0.0, -5e-3}}, 1e-6, 3), NotPositiveDefinite);
  CHECK(cholesky(Matrix{{1.0, 0.0}, {0.0, -5e-3}}, 1e-6, 4).jitter_used() == doctest::Approx(1e-2));
}

TEST_CASE("cholesky reconstructs random SPD matrices and is deterministic") {
  Stream s(StreamKey(3, {"spd"}));
  for (int t = 0; t < 10; ++t) {
    const Matrix a = random_spd(2 + t, s);
    const LowerTriangular l = cholesky(a);
    CHECK(frob_rel(l.reconstruct(), a) <= 1e-9);
    for (std::size_t i = 0; i < l.n(); ++i) CHECK(l(i, i) > 0.0);
    CHECK(cholesky(a).matrix() == l.matrix());
  }
}

TEST_CASE("solve_chol") {
  const LowerTriangular id = cholesky(Matrix::identity(2));
  const Vector x = solve_chol(id, Vector{1.0, 2.0});
  CHECK(x[0] == 1.0);
  CHECK(x[1] == 2.0);

  const Matrix a{{4.0, 2.0}, {2.0, 3.0}};
  const Vector b{2.0, 1.0};
  const Vector y = solve_chol(cholesky(a), b);
  CHECK(std::abs(4.0 * y[0] + 2.0 * y[1] - 2.0) <= 1e-12);
  CHECK(std::abs(2.0 * y[0] + 3.0 * y[1] - 1.0) <= 1e-12);

  CHECK_THROWS_AS(solve_chol(cholesky(a), Vector{1.0, 2.0, 3.0}), DimensionMismatch);

  Stream s(StreamKey(4, {"solve"}));
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 3 + 4 * t;
    const Matrix m = random_spd(n, s);
    Vector rhs(n);
    for (double& v : rhs) v = s.standard_normal();
    const Vector sol = solve_chol(cholesky(m), rhs);
    const Vector r = matvec(m, sol);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(r[i] - rhs[i]));
    CHECK(res <= 1e-8 * norm_inf(rhs));
  }
}

TEST_CASE("logdet") {
  CHECK(logdet(cholesky(Matrix::identity(4))) == 0.0);
  CHECK(logdet(cholesky(Matrix{{4.0, 2.0}, {2.0, 3.0}})) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
  CHECK(logdet(LowerTriangular(Matrix{{std::exp(1.0)}})) == doctest::Approx(2.0).epsilon(1e-15));
  // 3x3 by cofactor expansion.
  const Matrix a{{4.0, 1.0, 0.5}, {1.0, 3.0, 0.2}, {0.5, 0.2, 2.0}};
  const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                     a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  CHECK(std::abs(logdet(cholesky(a)) - std::log(det)) <= 1e-10);
}

TEST_CASE("inverse_from_chol") {
  Stream s(StreamKey(5, {"inv"}));
  const Matrix a = random_spd(6, s);
  const Matrix inv = inverse_from_chol(cholesky(a));
  const Matrix prod = matmul(a, inv);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(std::abs(prod(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
  CHECK(inv == inv.transpose());
}

TEST_CASE("products against scalar loops") {
  Stream s(StreamKey(6, {"prod"}));
  const Matrix a = random_matrix(5, 4, s), b = random_matrix(4, 3, s), c = random_matrix(6, 4, s),
               d = random_matrix(5, 2, s);
  const Matrix ab = matmul(a, b), act = matmul_nt(a, c), atd = matmul_tn(a, d);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) acc += a(i, k) * b(k, j);
      CHECK(ab(i, j) == doctest::Approx(acc).epsilon(1e-14));
    }
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 4; ++k) acc += a(i, k) * c(j, k);
      CHECK(act(i, j) == doctest::Approx(acc).epsilon(1e-14));
    }
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < 5; ++k) acc += a(k, i) * d(k, j);
      CHECK(atd(i, j) == doctest::Approx(acc).epsilon(1e-14));
    }
  CHECK_THROWS_AS(matmul(a, c), DimensionMismatch);
}

TEST_CASE("parallel kernels are bitwise equal to the serial reference at any thread count") {
  Stream s(StreamKey(7, {"par"}));
  // Large enough to cross the parallel threshold.
  const Matrix a = random_matrix(300, 60, s), b = random_matrix(60, 200, s), c = random_matrix(250, 60, s),
               d = random_matrix(300, 90, s);
  Vector x(60);
  for (double& v : x) v = s.standard_normal();
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 4}) {
    omp_set_num_threads(threads);
    CHECK(matmul(a, b) == serial::matmul(a, b));
    CHECK(matmul_nt(a, c) == serial::matmul_nt(a, c));
    CHECK(matmul_tn(a, d) == serial::matmul_tn(a, d));
    CHECK(matvec(a, x) == serial::matvec(a, x));
  }
  omp_set_num_threads(saved);
}
