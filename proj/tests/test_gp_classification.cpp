#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fd.hpp"
#include "groklab/errors.hpp"
#include "groklab/gp_classification.hpp"

using namespace grok;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Stream& s, double scale = 1.0) {
  Matrix m(r, c);
  for (double& v : m.data()) v = scale * s.standard_normal();
  return m;
}

GpcModel random_model(std::size_t n, std::size_t d, Stream& s) {
  GpcModel m;
  m.train_x = random_matrix(n, d, s);
  m.hyp = KernelHyperparams::isotropic(d, 1.0, 1.0);
  m.hyp.log_amplitude = 0.3 * s.standard_normal();
  for (double& l : m.hyp.log_lengthscales) l = 0.3 * s.standard_normal();
  m.q.mu.resize(n);
  for (double& v : m.q.mu) v = s.standard_normal();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) l(i, j) = i == j ? 0.5 + 0.5 * s.uniform_unit() : 0.3 * s.standard_normal();
  m.q.chol_cov = LowerTriangular(l);
  return m;
}

std::vector<int> random_labels(std::size_t n, Stream& s) {
  std::vector<int> y(n);
  for (int& v : y) v = static_cast<int>(s.uniform_index(2));
  return y;
}

}  // namespace

TEST_CASE("gauss-hermite rule integrates polynomials") {
  for (int order : {1, 2, 5, 20, 80}) {
    const GaussHermite gh = gauss_hermite(order);
    double w = 0.0, m2 = 0.0, m1 = 0.0;
    for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
      w += gh.weights[k];
      m1 += gh.weights[k] * gh.nodes[k];
      m2 += gh.weights[k] * gh.nodes[k] * gh.nodes[k];
      if (k > 0) CHECK(gh.nodes[k] > gh.nodes[k - 1]);
    }
    CHECK(w == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK(std::abs(m1) < 1e-12);
    if (order >= 2) CHECK(m2 == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-12));
  }
}

TEST_CASE("log normal cdf is continuous across the asymptotic switch") {
  CHECK(log_normal_cdf(0.0) == doctest::Approx(std::log(0.5)));
  const double a = log_normal_cdf(-25.0 + 1e-9), b = log_normal_cdf(-25.0 - 1e-9);
  CHECK(std::abs(a - b) < 1e-7);
  CHECK(std::isfinite(log_normal_cdf(-200.0)));
  CHECK(inverse_mills(-200.0) == doctest::Approx(200.0).epsilon(1e-4));
}

TEST_CASE("kl_gaussians") {
  Stream s(StreamKey(11, {"kl"}));
  const Matrix a = random_matrix(4, 4, s);
  Matrix spd = matmul_tn(a, a);
  for (std::size_t i = 0; i < 4; ++i) spd(i, i) += 1.0;
  const LowerTriangular l = cholesky(spd);
  CHECK(std::abs(kl_gaussians(Vector(4, 0.0), l, l)) < 1e-12);

  const LowerTriangular id(Matrix::identity(3));
  CHECK(kl_gaussians({1.0, -2.0, 0.5}, id, id) == doctest::Approx(0.5 * (1 + 4 + 0.25)).epsilon(1e-14));

  // 2-D dense oracle.
  const Matrix p{{2.0, 0.3}, {0.3, 1.0}};
  const Matrix q{{0.5, -0.1}, {-0.1, 0.8}};
  const Vector mu{0.4, -0.7};
  const double detp = 2.0 - 0.09, detq = 0.4 - 0.01;
  const Matrix pinv{{1.0 / detp, -0.3 / detp}, {-0.3 / detp, 2.0 / detp}};
  double tr = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      tr += pinv(i, j) * q(j, i);
      quad += mu[i] * pinv(i, j) * mu[j];
    }
  const double expected = 0.5 * (tr + quad - 2 + std::log(detp) - std::log(detq));
  CHECK(std::abs(kl_gaussians(mu, cholesky(q), cholesky(p)) - expected) <= 1e-10);
}

TEST_CASE("elbo at the prior has zero kl") {
  Stream s(StreamKey(12, {"prior"}));
  GpcModel m = random_model(6, 2, s);
  m.q.mu.assign(6, 0.0);
  m.q.chol_cov = cholesky(gpc_prior_cov(m.train_x, m.hyp));
  const auto b = elbo(m, random_labels(6, s), 1.0, 20);
  CHECK(std::abs(b.kl) < 1e-10);
}

TEST_CASE("elbo with a near-deterministic point") {
  GpcModel m;
  m.train_x = Matrix{{0.0}};
  m.hyp = KernelHyperparams::isotropic(1, 1.0, 1.0);
  m.q.mu = {0.0};
  m.q.chol_cov = LowerTriangular(Matrix{{1e-8}});
  CHECK(elbo(m, {1}, 1.0, 20).expected_loglik == doctest::Approx(std::log(0.5)).epsilon(1e-8));
}

TEST_CASE("elbo identities") {
  Stream s(StreamKey(13, {"id"}));
  for (int t = 0; t < 10; ++t) {
    const GpcModel m = random_model(7, 3, s);
    const auto y = random_labels(7, s);
    for (double beta : {0.0, 0.5, 1.0, 2.0}) {
      const auto b = elbo(m, y, beta, 20);
      CHECK((b.data_fit + beta * b.complexity) + b.elbo == 0.0);
      CHECK(b.kl >= 0.0);
    }
  }
}

TEST_CASE("quadrature refinement") {
  // Truncation error of the 20-point rule grows quickly with the marginal
  // std; this instance keeps every marginal std below 1.
  Stream s(StreamKey(21, {"quad"}));
  for (int t = 0; t < 10; ++t) {
    GpcModel m = random_model(7, 3, s);
    Matrix l = m.q.chol_cov.matrix();
    for (double& v : l.data()) v *= 0.6;
    m.q.chol_cov = LowerTriangular(l);
    const auto y = random_labels(7, s);
    CHECK(std::abs(elbo(m, y, 1.0, 20).expected_loglik - elbo(m, y, 1.0, 80).expected_loglik) <= 1e-8);
  }
}

TEST_CASE("elbo gradient matches finite differences") {
  Stream s(StreamKey(14, {"fd"}));
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 5, d = 2;
    const GpcModel m = random_model(n, d, s);
    const auto y = random_labels(n, s);
    const double beta = t % 3 == 0 ? 0.7 : 1.0;
    const ElboGrad g = elbo_grad(m, y, beta, 20);

    // mu
    for (std::size_t i = 0; i < n; ++i) {
      auto f = [&](const std::vector<double>& p) {
        GpcModel mm = m;
        mm.q.mu = p;
        return elbo(mm, y, beta, 20).elbo;
      };
      CHECK(groktest::rel_err(g.mu[i], groktest::central_diff(f, m.q.mu, i)) <= 1e-5);
    }
    // L entries
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        auto f = [&](const std::vector<double>& p) {
          Matrix l = m.q.chol_cov.matrix();
          l(i, j) = p[0];
          GpcModel mm = m;
          mm.q.chol_cov = LowerTriangular(l);
          return elbo(mm, y, beta, 20).elbo;
        };
        CHECK(groktest::rel_err(g.chol(i, j), groktest::central_diff(f, {m.q.chol_cov(i, j)}, 0)) <= 1e-5);
      }
    // hyperparameters
    Vector hp{m.hyp.log_amplitude};
    hp.insert(hp.end(), m.hyp.log_lengthscales.begin(), m.hyp.log_lengthscales.end());
    for (std::size_t i = 0; i < hp.size(); ++i) {
      auto f = [&](const std::vector<double>& p) {
        GpcModel mm = m;
        mm.hyp.log_amplitude = p[0];
        mm.hyp.log_lengthscales.assign(p.begin() + 1, p.end());
        return elbo(mm, y, beta, 20).elbo;
      };
      CHECK(groktest::rel_err(g.hyp[i], groktest::central_diff(f, hp, i)) <= 1e-5);
    }
  }
}

TEST_CASE("kl gradient vanishes at the prior and with beta zero") {
  Stream s(StreamKey(15, {"klg"}));
  GpcModel m = random_model(4, 2, s);
  const auto y = random_labels(4, s);
  const ElboGrad g0 = elbo_grad(m, y, 0.0, 20);
  GpcModel mz = m;
  const ElboGrad g1 = elbo_grad(mz, y, 1.0, 20);
  // beta = 0: gradient equals the likelihood part only, independent of K
  mz.hyp.log_amplitude += 1.0;
  const ElboGrad g2 = elbo_grad(mz, y, 0.0, 20);
  CHECK(g0.mu == g2.mu);
  for (double v : g0.hyp) CHECK(v == 0.0);
  CHECK(g1.mu != g0.mu);

  // At mu = 0 the KL part of the mu gradient is zero.
  m.q.mu.assign(4, 0.0);
  const ElboGrad a = elbo_grad(m, y, 1.0, 20), b = elbo_grad(m, y, 0.0, 20);
  for (std::size_t i = 0; i < 4; ++i) CHECK(a.mu[i] == b.mu[i]);
}

TEST_CASE("predictive probability") {
  Stream s(StreamKey(16, {"pred"}));
  GpcModel m = random_model(6, 2, s);
  const Matrix xs = random_matrix(5, 2, s);
  const Vector closed = predict_proba(m, xs);
  const Vector quad = predict_proba_quadrature(m, xs, 60);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(closed[i] - quad[i]) <= 1e-8);
    CHECK(closed[i] >= 0.0);
    CHECK(closed[i] <= 1.0);
  }
  m.q.mu.assign(6, 0.0);
  for (double p : predict_proba(m, xs)) CHECK(p == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("fit_gpc with zero learning rate is constant") {
  const SplitDataset d = gen_zero_one(12, 12, StreamKey(17, {"z"}));
  GpcConfig cfg;
  cfg.adam.lr = 0.0;
  cfg.epochs = 4;
  const GpcFit fit = fit_gpc(d, cfg);
  REQUIRE(fit.trace.size() == 5);
  for (const auto& r : fit.trace.rows) {
    CHECK(r.train_loss == fit.trace.rows[0].train_loss);
    CHECK(r.val_acc == fit.trace.rows[0].val_acc);
  }
}

TEST_CASE("laplace gaussian likelihood matches the regression complexity") {
  Stream s(StreamKey(18, {"lap"}));
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 6 + static_cast<std::size_t>(t);
    const Matrix x = random_matrix(n, 2, s);
    Vector y(n);
    for (double& v : y) v = s.standard_normal();
    const auto hyp = KernelHyperparams::isotropic(2, 0.5 + s.uniform_unit(), 0.5 + s.uniform_unit());
    LaplaceConfig cfg;
    cfg.likelihood = LaplaceLikelihood::gaussian;
    cfg.noise = 0.2 + 0.5 * s.uniform_unit();
    const auto lb = laplace(x, y, hyp, cfg);
    Matrix k = gpc_prior_cov(x, hyp);
    for (std::size_t i = 0; i < n; ++i) k(i, i) += cfg.noise * cfg.noise;
    const double gpr = 0.5 * logdet(cholesky(k)) - 0.5 * static_cast<double>(n) * std::log(cfg.noise * cfg.noise);
    CHECK(std::abs(lb.complexity_term - gpr) <= 1e-9);
  }
}

TEST_CASE("laplace probit mode") {
  Stream s(StreamKey(19, {"mode"}));
  const Matrix x = random_matrix(8, 2, s);
  Vector y(8);
  for (double& v : y) v = static_cast<double>(s.uniform_index(2));
  const auto hyp = KernelHyperparams::isotropic(2, 1.0, 2.0);
  const auto lb = laplace(x, y, hyp);
  CHECK(norm_inf(laplace_objective_grad(x, y, hyp, lb.mode)) <= 1e-8);
  CHECK(lb.total == lb.data_fit_term - lb.complexity_term);

  // Mirror symmetry on a single point.
  const Matrix x1{{0.2}};
  const auto h1 = KernelHyperparams::isotropic(1, 1.0, 1.5);
  const auto p = laplace(x1, {1.0}, h1), q = laplace(x1, {0.0}, h1);
  CHECK(p.mode[0] > 0.0);
  CHECK(p.mode[0] == doctest::Approx(-q.mode[0]).epsilon(1e-10));
}

TEST_CASE("laplace mode agrees with a grid search on n=2") {
  const Matrix x{{0.0}, {0.8}};
  const Vector y{1.0, 0.0};
  const auto hyp = KernelHyperparams::isotropic(1, 1.0, 2.0);
  const auto lb = laplace(x, y, hyp);
  const Matrix k = gpc_prior_cov(x, hyp);
  const LowerTriangular l = cholesky(k);
  auto psi = [&](double f0, double f1) {
    const Vector f{f0, f1};
    const Vector a = solve_chol(l, f);
    return -0.5 * dot(a, f) + log_normal_cdf(f0) + log_normal_cdf(-f1);
  };
  // Coarse grid then a fine grid around the best cell.
  double best = -1e300, b0 = 0, b1 = 0;
  for (double f0 = -3; f0 <= 3; f0 += 0.01)
    for (double f1 = -3; f1 <= 3; f1 += 0.01)
      if (double v = psi(f0, f1); v > best) best = v, b0 = f0, b1 = f1;
  const double c0 = b0, c1 = b1;
  for (double f0 = c0 - 0.01; f0 <= c0 + 0.01; f0 += 2e-5)
    for (double f1 = c1 - 0.01; f1 <= c1 + 0.01; f1 += 2e-5)
      if (double v = psi(f0, f1); v > best) best = v, b0 = f0, b1 = f1;
  CHECK(std::abs(lb.mode[0] - b0) <= 1e-4);
  CHECK(std::abs(lb.mode[1] - b1) <= 1e-4);
}

TEST_CASE("laplace surface on a 1x1 grid equals a direct call") {
  const SplitDataset d = gen_zero_one(10, 10, StreamKey(20, {"z"}));
  GridConfig g;
  g.n_lengthscale = 1;
  g.n_amplitude = 1;
  GpcConfig cfg;
  cfg.epochs = 3;
  const LandscapeScan scan = laplace_surface(d, g, default_gpc_inits(1), cfg);
  Vector y(d.train_labels.begin(), d.train_labels.end());
  const auto direct = laplace(d.train_x, y, KernelHyperparams::isotropic(1, g.lengthscale_min, g.amplitude_min));
  CHECK(scan.total(0, 0) == direct.total);
  REQUIRE(scan.trajectories.size() == 3);
  for (const auto& t : scan.trajectories) CHECK(t.points.size() == 4);
}
