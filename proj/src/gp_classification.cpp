#include "groklab/gp_classification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "groklab/errors.hpp"
#include "groklab/linear_model.hpp"

namespace grok {

GaussHermite gauss_hermite(int order) {
  if (order < 1) throw InvalidArgument("gauss_hermite: order must be >= 1");
  const int n = order;
  const double pim4 = 0.7511255444649425;  // pi^-1/4
  Vector x(static_cast<std::size_t>(n));
  Vector w(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[static_cast<std::size_t>(i - 2)];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // Orthonormal Hermite recurrence.
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    x[static_cast<std::size_t>(n - 1 - i)] = -z;
    w[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    w[static_cast<std::size_t>(n - 1 - i)] = w[static_cast<std::size_t>(i)];
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(m - 1)] = 0.0;
  // The recurrence produces descending nodes.
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
  return {x, w};
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double log_normal_cdf(double z) {
  if (z > -25.0) return std::log(normal_cdf(z));
  // Asymptotic expansion of the Mills ratio.
  const double z2 = z * z;
  const double u = 1.0 / z2;
  const double series = 1.0 - u * (1.0 - 3.0 * u * (1.0 - 5.0 * u * (1.0 - 7.0 * u)));
  return -0.5 * z2 - std::log(-z) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double inverse_mills(double z) {
  const double log_pdf = -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
  return std::exp(log_pdf - log_normal_cdf(z));
}

Matrix gpc_prior_cov(const Matrix& x, const KernelHyperparams& hyp) {
  Matrix k = rbf_kernel(x, x, hyp);
  for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) += kDefaultJitter;
  return k;
}

double kl_gaussians(const Vector& mu_q, const LowerTriangular& chol_q, const LowerTriangular& chol_p) {
  const std::size_t n = mu_q.size();
  if (chol_q.n() != n || chol_p.n() != n) throw DimensionMismatch("kl_gaussians: dimension mismatch");
  // tr(K^-1 S) = ||Lp^-1 Lq||_F^2, mu^T K^-1 mu = ||Lp^-1 mu||^2
  const Matrix m = solve_lower(chol_p, chol_q.matrix());
  double tr = 0.0;
  for (double v : m.data()) tr += v * v;
  const Vector a = solve_lower(chol_p, mu_q);
  const double quad = dot(a, a);
  return 0.5 * (tr + quad - static_cast<double>(n) + logdet(chol_p) - logdet(chol_q));
}

namespace {

void check_labels(const GpcModel& model, const std::vector<int>& y01) {
  const std::size_t n = model.q.mu.size();
  if (y01.size() != n || model.train_x.rows() != n || model.q.chol_cov.n() != n)
    throw DimensionMismatch("gpc: labels, inputs and posterior disagree in size");
  for (int y : y01)
    if (y != 0 && y != 1) throw InvalidArgument("gpc: labels must be 0 or 1");
}

// Per-point expectation of ln Phi(t f) under N(m, s^2) and its derivatives
// with respect to m and s.
struct PointExpectation {
  double value = 0.0;
  double d_mean = 0.0;
  double d_std = 0.0;
};

PointExpectation expect_log_probit(double t, double m, double s, const GaussHermite& gh) {
  PointExpectation out;
  const double c = 1.0 / std::sqrt(std::numbers::pi);
  for (std::size_t k = 0; k < gh.nodes.size(); ++k) {
    const double f = m + std::numbers::sqrt2 * s * gh.nodes[k];
    const double w = gh.weights[k] * c;
    out.value += w * log_normal_cdf(t * f);
    const double g = t * inverse_mills(t * f);
    out.d_mean += w * g;
    out.d_std += w * g * std::numbers::sqrt2 * gh.nodes[k];
  }
  return out;
}

double marginal_std(const LowerTriangular& l, std::size_t i) {
  double s = 0.0;
  for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * l(i, j);
  return std::sqrt(s);
}

double sign_of(int y01) { return y01 == 1 ? 1.0 : -1.0; }

}  // namespace

ElboBreakdown elbo(const GpcModel& model, const std::vector<int>& y01, double beta, int quad_order) {
  check_labels(model, y01);
  const GaussHermite gh = gauss_hermite(quad_order);
  ElboBreakdown out;
  for (std::size_t i = 0; i < y01.size(); ++i)
    out.expected_loglik +=
        expect_log_probit(sign_of(y01[i]), model.q.mu[i], marginal_std(model.q.chol_cov, i), gh).value;
  const LowerTriangular lk = cholesky(gpc_prior_cov(model.train_x, model.hyp), 0.0);
  out.kl = kl_gaussians(model.q.mu, model.q.chol_cov, lk);
  out.data_fit = -out.expected_loglik;
  out.complexity = out.kl;
  out.elbo = -(out.data_fit + beta * out.complexity);
  return out;
}

ElboGrad elbo_grad(const GpcModel& model, const std::vector<int>& y01, double beta, int quad_order) {
  check_labels(model, y01);
  const std::size_t n = y01.size();
  const GaussHermite gh = gauss_hermite(quad_order);
  const LowerTriangular& l = model.q.chol_cov;
  const Matrix& lm = l.matrix();

  ElboGrad g;
  g.mu.assign(n, 0.0);
  g.chol = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = marginal_std(l, i);
    const PointExpectation pe = expect_log_probit(sign_of(y01[i]), model.q.mu[i], s, gh);
    g.mu[i] = pe.d_mean;
    for (std::size_t j = 0; j <= i; ++j) g.chol(i, j) = pe.d_std * lm(i, j) / s;
  }

  Matrix kf = rbf_kernel(model.train_x, model.train_x, model.hyp);
  Matrix k = kf;
  for (std::size_t i = 0; i < n; ++i) k(i, i) += kDefaultJitter;
  const LowerTriangular lk = cholesky(k, 0.0);
  const Matrix kinv = inverse_from_chol(lk);
  const Vector a = solve_chol(lk, model.q.mu);

  // KL gradients: mu -> K^-1 mu, L -> K^-1 L - diag(1/L_ii).
  const Matrix kinv_l = matmul(kinv, lm);
  for (std::size_t i = 0; i < n; ++i) {
    g.mu[i] -= beta * a[i];
    for (std::size_t j = 0; j <= i; ++j) {
      double d = kinv_l(i, j);
      if (i == j) d -= 1.0 / lm(i, i);
      g.chol(i, j) -= beta * d;
    }
  }

  // dKL/dK = 1/2 (K^-1 - K^-1 S K^-1 - a a^T)
  const Matrix t = matmul_nt(kinv_l, kinv_l);  // K^-1 L L^T K^-1
  Matrix dk(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dk(i, j) = 0.5 * (kinv(i, j) - t(i, j) - a[i] * a[j]);

  auto contract = [&](const Matrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) s += dk.data()[i] * m.data()[i];
    return s;
  };
  g.hyp.assign(model.hyp.dim() + 1, 0.0);
  g.hyp[0] = -beta * contract(kf);
  for (std::size_t d = 0; d < model.hyp.dim(); ++d)
    g.hyp[1 + d] = -beta * contract(rbf_lengthscale_derivative(model.train_x, kf, model.hyp, d));
  return g;
}

namespace {

struct LatentPrediction {
  Vector mean;
  Vector var;
};

LatentPrediction latent_predict(const GpcModel& model, const Matrix& xstar) {
  const LowerTriangular lk = cholesky(gpc_prior_cov(model.train_x, model.hyp), 0.0);
  const Matrix ks = rbf_kernel(model.train_x, xstar, model.hyp);  // n x m
  const Matrix a = solve_chol(lk, ks);                               // K^-1 K*
  const Matrix la = matmul_tn(model.q.chol_cov.matrix(), a);          // L^T K^-1 K*
  const std::size_t n = model.train_x.rows();
  LatentPrediction out;
  out.mean.assign(xstar.rows(), 0.0);
  out.var.assign(xstar.rows(), 0.0);
  const double prior = model.hyp.amplitude();
  for (std::size_t j = 0; j < xstar.rows(); ++j) {
    double m = 0.0, q = 0.0, r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      m += a(i, j) * model.q.mu[i];
      q += ks(i, j) * a(i, j);
      r += la(i, j) * la(i, j);
    }
    out.mean[j] = m;
    out.var[j] = std::max(0.0, prior - q + r);
  }
  return out;
}

}  // namespace

Vector predict_proba(const GpcModel& model, const Matrix& xstar) {
  const LatentPrediction lp = latent_predict(model, xstar);
  Vector p(lp.mean.size());
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = normal_cdf(lp.mean[j] / std::sqrt(1.0 + lp.var[j]));
  return p;
}

Vector predict_proba_quadrature(const GpcModel& model, const Matrix& xstar, int quad_order) {
  const LatentPrediction lp = latent_predict(model, xstar);
  const GaussHermite gh = gauss_hermite(quad_order);
  Vector p(lp.mean.size(), 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double s = std::sqrt(lp.var[j]);
    for (std::size_t k = 0; k < gh.nodes.size(); ++k)
      p[j] += gh.weights[k] * normal_cdf(lp.mean[j] + std::numbers::sqrt2 * s * gh.nodes[k]);
    p[j] /= std::sqrt(std::numbers::pi);
  }
  return p;
}

std::vector<int> predict_labels(const GpcModel& model, const Matrix& xstar) {
  const Vector p = predict_proba(model, xstar);
  std::vector<int> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] >= 0.5 ? 1 : 0;
  return out;
}

namespace {

// Packed layout: mu (n), lower triangle of L row by row with the diagonal
// stored as ln L_ii, then ln alpha and ln l_1..ln l_d.
Vector pack_gpc(const GpcModel& m) {
  const std::size_t n = m.q.mu.size();
  Vector v(m.q.mu);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) v.push_back(i == j ? std::log(m.q.chol_cov(i, i)) : m.q.chol_cov(i, j));
  v.push_back(m.hyp.log_amplitude);
  v.insert(v.end(), m.hyp.log_lengthscales.begin(), m.hyp.log_lengthscales.end());
  return v;
}

void unpack_gpc(std::span<const double> v, GpcModel& m) {
  const std::size_t n = m.q.mu.size();
  std::size_t p = 0;
  for (std::size_t i = 0; i < n; ++i) m.q.mu[i] = v[p++];
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      l(i, j) = i == j ? std::exp(v[p]) : v[p];
      ++p;
    }
  m.q.chol_cov = LowerTriangular(std::move(l));
  m.hyp.log_amplitude = v[p++];
  for (double& x : m.hyp.log_lengthscales) x = v[p++];
}

Vector pack_grad(const ElboGrad& g, const GpcModel& m) {
  const std::size_t n = m.q.mu.size();
  Vector v(g.mu);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) v.push_back(i == j ? g.chol(i, i) * m.q.chol_cov(i, i) : g.chol(i, j));
  v.insert(v.end(), g.hyp.begin(), g.hyp.end());
  return v;
}

}  // namespace

GpcFit fit_gpc(const SplitDataset& data, const GpcConfig& cfg) {
  return fit_gpc(data,
                 KernelHyperparams::isotropic(data.train_x.cols(), cfg.init_lengthscale, cfg.init_amplitude),
                 cfg);
}

GpcFit fit_gpc(const SplitDataset& data, const KernelHyperparams& hyp0, const GpcConfig& cfg) {
  if (cfg.epochs < 1) throw InvalidArgument("fit_gpc: epochs must be >= 1");
  if (data.meta.num_classes != 2) throw InvalidArgument("fit_gpc: dataset is not a binary classification task");
  GpcFit fit;
  GpcModel& model = fit.model;
  model.hyp = hyp0;
  model.train_x = data.train_x;
  model.q.mu.assign(data.n_train(), 0.0);
  model.q.chol_cov = cholesky(gpc_prior_cov(data.train_x, hyp0), 0.0);
  fit.trace.model = "gpc";
  fit.trace.key = data.meta.key;

  Vector theta = pack_gpc(model);
  Adam adam(theta.size(), cfg.adam);
  for (std::size_t e = 0;; ++e) {
    const ElboBreakdown b = elbo(model, data.train_labels, cfg.beta, cfg.quad_order);
    if (!std::isfinite(b.elbo)) throw Divergence("fit_gpc: non-finite elbo at epoch " + std::to_string(e));
    TraceRow row;
    row.epoch = e;
    row.data_fit = b.data_fit;
    row.complexity = b.complexity;
    row.train_loss = -b.elbo;
    row.train_acc = accuracy(predict_labels(model, data.train_x), data.train_labels);
    row.val_acc = data.n_val() ? accuracy(predict_labels(model, data.val_x), data.val_labels) : 0.0;
    fit.trace.rows.push_back(row);
    fit.hyp_path.push_back(model.hyp);
    fit.breakdowns.push_back(b);
    if (e == cfg.epochs) break;

    Vector g = pack_grad(elbo_grad(model, data.train_labels, cfg.beta, cfg.quad_order), model);
    for (double& v : g) v = -v;
    adam.step(theta, g);
    unpack_gpc(theta, model);
  }
  return fit;
}

namespace {

struct LikelihoodTerms {
  double logp = 0.0;
  Vector grad;
  Vector w;  // -d2 log p / df2
};

LikelihoodTerms likelihood_terms(const Vector& y, const Vector& f, const LaplaceConfig& cfg) {
  LikelihoodTerms t;
  const std::size_t n = f.size();
  t.grad.assign(n, 0.0);
  t.w.assign(n, 0.0);
  if (cfg.likelihood == LaplaceLikelihood::gaussian) {
    const double s2 = cfg.noise * cfg.noise;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f[i];
      t.logp += -0.5 * r * r / s2 - 0.5 * std::log(2.0 * std::numbers::pi * s2);
      t.grad[i] = r / s2;
      t.w[i] = 1.0 / s2;
    }
    return t;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double s = y[i] > 0.5 ? 1.0 : -1.0;
    const double z = s * f[i];
    const double r = inverse_mills(z);
    t.logp += log_normal_cdf(z);
    t.grad[i] = s * r;
    t.w[i] = r * r + z * r;
  }
  return t;
}

}  // namespace

Vector laplace_objective_grad(const Matrix& x, const Vector& y, const KernelHyperparams& hyp, const Vector& f,
                              const LaplaceConfig& cfg) {
  const LowerTriangular lk = cholesky(gpc_prior_cov(x, hyp), 0.0);
  const Vector a = solve_chol(lk, f);
  Vector g = likelihood_terms(y, f, cfg).grad;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= a[i];
  return g;
}

LaplaceBreakdown laplace(const Matrix& x, const Vector& y, const KernelHyperparams& hyp, const LaplaceConfig& cfg) {
  if (x.rows() != y.size()) throw DimensionMismatch("laplace: inputs and targets differ in length");
  if (cfg.likelihood == LaplaceLikelihood::probit)
    for (double v : y)
      if (v != 0.0 && v != 1.0) throw InvalidArgument("laplace: probit targets must be 0 or 1");
  const std::size_t n = y.size();
  const Matrix k = gpc_prior_cov(x, hyp);

  // Newton iteration in the a = K^-1 f parameterisation.
  Vector a(n, 0.0), f(n, 0.0);
  auto objective = [&](const Vector& av, const Vector& fv) {
    return -0.5 * dot(av, fv) + likelihood_terms(y, fv, cfg).logp;
  };
  double psi = objective(a, f);
  LaplaceBreakdown out;
  bool converged = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const LikelihoodTerms lt = likelihood_terms(y, f, cfg);
    Vector sw(n);
    for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(lt.w[i]);
    Matrix b = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) b(i, j) += sw[i] * k(i, j) * sw[j];
    const LowerTriangular lb = cholesky(b, 0.0);
    Vector rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = lt.w[i] * f[i] + lt.grad[i];
    const Vector kb = matvec(k, rhs);
    Vector tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = sw[i] * kb[i];
    const Vector sol = solve_chol(lb, tmp);
    Vector a_new(n);
    for (std::size_t i = 0; i < n; ++i) a_new[i] = rhs[i] - sw[i] * sol[i];

    // Step halving until the objective does not decrease.
    double step = 1.0;
    Vector a_try, f_try;
    double psi_try = -std::numeric_limits<double>::infinity();
    for (int h = 0; h < 40; ++h) {
      a_try = a;
      for (std::size_t i = 0; i < n; ++i) a_try[i] += step * (a_new[i] - a[i]);
      f_try = matvec(k, a_try);
      psi_try = objective(a_try, f_try);
      if (psi_try >= psi) break;
      step *= 0.5;
    }
    out.iterations = it;
    if (!(psi_try >= psi)) {
      converged = true;  // no ascent direction left at double precision
      break;
    }
    const double change = psi_try - psi;
    a = std::move(a_try);
    f = std::move(f_try);
    psi = psi_try;
    if (change < cfg.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) throw NewtonNonConvergence("laplace: no convergence after " + std::to_string(cfg.max_iterations) +
                                             " iterations");

  const LikelihoodTerms lt = likelihood_terms(y, f, cfg);
  Matrix b = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) += std::sqrt(lt.w[i]) * k(i, j) * std::sqrt(lt.w[j]);
  out.mode = f;
  out.data_fit_term = -0.5 * dot(a, f) + lt.logp;
  out.complexity_term = 0.5 * logdet(cholesky(b, 0.0));
  out.total = out.data_fit_term - out.complexity_term;
  return out;
}

std::vector<NamedInit> default_gpc_inits(std::size_t d) {
  return {{"A", KernelHyperparams::isotropic(d, 0.1, 5.0)},
          {"B", KernelHyperparams::isotropic(d, 0.1, 0.1)},
          {"C", KernelHyperparams::isotropic(d, 1.0, 1.0)}};
}

LandscapeScan laplace_surface(const SplitDataset& data, const GridConfig& grid, const std::vector<NamedInit>& inits,
                              const GpcConfig& cfg) {
  const std::size_t d = data.train_x.cols();
  Vector y(data.n_train());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = data.train_labels[i];
  LandscapeScan scan;
  scan.axis_lengthscale = log_space(grid.lengthscale_min, grid.lengthscale_max, grid.n_lengthscale);
  scan.axis_amplitude = log_space(grid.amplitude_min, grid.amplitude_max, grid.n_amplitude);
  const std::size_t nl = scan.axis_lengthscale.size();
  const std::size_t na = scan.axis_amplitude.size();
  scan.data_fit = Matrix(nl, na);
  scan.complexity = Matrix(nl, na);
  scan.total = Matrix(nl, na);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t c = 0; c < nl * na; ++c) {
    const std::size_t i = c / na;
    const std::size_t j = c % na;
    const auto hyp = KernelHyperparams::isotropic(d, scan.axis_lengthscale[i], scan.axis_amplitude[j]);
    const LaplaceBreakdown b = laplace(data.train_x, y, hyp);
    scan.data_fit(i, j) = b.data_fit_term;
    scan.complexity(i, j) = b.complexity_term;
    scan.total(i, j) = b.total;
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& init : inits) {
    const GpcFit fit = fit_gpc(data, init.hyp, cfg);
    Trajectory t;
    t.label = init.label;
    for (std::size_t s = 0; s < fit.hyp_path.size(); ++s) {
      const ElboBreakdown& b = fit.breakdowns[s];
      t.points.push_back({s, fit.hyp_path[s].mean_lengthscale(), fit.hyp_path[s].amplitude(), b.data_fit, b.complexity,
                          b.elbo, nan, nan});
    }
    scan.trajectories.push_back(std::move(t));
  }
  return scan;
}

}  // namespace grok
