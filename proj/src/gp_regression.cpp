#include "groklab/gp_regression.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "groklab/errors.hpp"

namespace grok {

KernelHyperparams KernelHyperparams::isotropic(std::size_t d, double lengthscale, double amplitude, double noise) {
  if (!(lengthscale > 0.0) || !(amplitude > 0.0) || !(noise > 0.0))
    throw InvalidArgument("kernel hyperparameters must be positive");
  return {std::log(amplitude), Vector(d, std::log(lengthscale)), std::log(noise)};
}

double KernelHyperparams::amplitude() const { return std::exp(log_amplitude); }
double KernelHyperparams::noise() const { return std::exp(log_noise); }

Vector KernelHyperparams::pack() const {
  Vector v;
  v.reserve(dim() + 2);
  v.push_back(log_amplitude);
  v.insert(v.end(), log_lengthscales.begin(), log_lengthscales.end());
  v.push_back(log_noise);
  return v;
}

KernelHyperparams KernelHyperparams::unpack(std::span<const double> v) {
  if (v.size() < 2) throw DimensionMismatch("KernelHyperparams::unpack: need at least 2 values");
  KernelHyperparams h;
  h.log_amplitude = v.front();
  h.log_lengthscales.assign(v.begin() + 1, v.end() - 1);
  h.log_noise = v.back();
  return h;
}

double KernelHyperparams::mean_lengthscale() const {
  if (log_lengthscales.empty()) return 1.0;
  double s = 0.0;
  for (double l : log_lengthscales) s += l;
  return std::exp(s / static_cast<double>(log_lengthscales.size()));
}

Matrix rbf_kernel(const Matrix& x1, const Matrix& x2, const KernelHyperparams& hyp) {
  if (x1.cols() != x2.cols() || x1.cols() != hyp.dim())
    throw DimensionMismatch("rbf_kernel: input dimension does not match the lengthscales");
  const std::size_t d = hyp.dim();
  Vector inv_l2(d);
  for (std::size_t k = 0; k < d; ++k) inv_l2[k] = std::exp(-2.0 * hyp.log_lengthscales[k]);
  const double alpha = hyp.amplitude();
  Matrix out(x1.rows(), x2.rows());
#pragma omp parallel for schedule(static) if (x1.rows() * x2.rows() * d > (1u << 15))
  for (std::size_t i = 0; i < x1.rows(); ++i) {
    auto a = x1.row(i);
    for (std::size_t j = 0; j < x2.rows(); ++j) {
      auto b = x2.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        const double diff = a[k] - b[k];
        s += diff * diff * inv_l2[k];
      }
      out(i, j) = alpha * std::exp(-0.5 * s);
    }
  }
  return out;
}

Matrix rbf_lengthscale_derivative(const Matrix& x, const Matrix& k, const KernelHyperparams& hyp, std::size_t d) {
  const double inv_l2 = std::exp(-2.0 * hyp.log_lengthscales.at(d));
  Matrix out(k.rows(), k.cols());
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = 0; j < k.cols(); ++j) {
      const double diff = x(i, d) - x(j, d);
      out(i, j) = k(i, j) * diff * diff * inv_l2;
    }
  return out;
}

LowerTriangular factor_kernel(const Matrix& k) {
  try {
    return cholesky(k, 0.0);
  } catch (const NotPositiveDefinite&) {
    return cholesky(k, kDefaultJitter, 3);
  }
}

namespace {

Matrix noisy_kernel(const Matrix& x, const KernelHyperparams& hyp, Matrix* kf_out = nullptr) {
  Matrix k = rbf_kernel(x, x, hyp);
  if (kf_out) *kf_out = k;
  const double s2 = std::exp(2.0 * hyp.log_noise);
  for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) += s2;
  return k;
}

void check_xy(const Matrix& x, const Vector& y) {
  if (x.rows() != y.size()) throw DimensionMismatch("gp: input rows and targets differ in length");
  if (x.rows() == 0) throw InvalidArgument("gp: need at least one training point");
}

}  // namespace

LmlBreakdown lml(const Matrix& x, const Vector& y, const KernelHyperparams& hyp) {
  check_xy(x, y);
  const LowerTriangular l = factor_kernel(noisy_kernel(x, hyp));
  const Vector a = solve_chol(l, y);
  LmlBreakdown out;
  out.data_fit = 0.5 * dot(y, a);
  out.complexity = 0.5 * logdet(l);
  out.normalization = 0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
  out.total = -(out.data_fit + out.complexity + out.normalization);
  return out;
}

Vector lml_grad(const Matrix& x, const Vector& y, const KernelHyperparams& hyp) {
  check_xy(x, y);
  Matrix kf;
  const LowerTriangular l = factor_kernel(noisy_kernel(x, hyp, &kf));
  const Vector a = solve_chol(l, y);
  const Matrix kinv = inverse_from_chol(l);
  const std::size_t n = y.size();
  // dL/dtheta = 1/2 sum_ij (a_i a_j - Kinv_ij) dK_ij
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) w(i, j) = a[i] * a[j] - kinv(i, j);

  auto contract = [&](const Matrix& dk) {
    double s = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) s += w.data()[i] * dk.data()[i];
    return 0.5 * s;
  };

  Vector g(hyp.dim() + 2, 0.0);
  g[0] = contract(kf);
  for (std::size_t d = 0; d < hyp.dim(); ++d) g[1 + d] = contract(rbf_lengthscale_derivative(x, kf, hyp, d));
  double tr = 0.0;
  for (std::size_t i = 0; i < n; ++i) tr += w(i, i);
  g.back() = tr * std::exp(2.0 * hyp.log_noise);
  return g;
}

GpPrediction predict(const Matrix& x, const Vector& y, const KernelHyperparams& hyp, const Matrix& xstar) {
  check_xy(x, y);
  const LowerTriangular l = factor_kernel(noisy_kernel(x, hyp));
  const Vector a = solve_chol(l, y);
  const Matrix ks = rbf_kernel(x, xstar, hyp);  // n x m
  const Matrix v = solve_lower(l, ks);
  const double prior = hyp.amplitude() + std::exp(2.0 * hyp.log_noise);
  GpPrediction out;
  out.mean.assign(xstar.rows(), 0.0);
  out.variance.assign(xstar.rows(), 0.0);
  for (std::size_t j = 0; j < xstar.rows(); ++j) {
    double m = 0.0;
    double q = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      m += ks(i, j) * a[i];
      q += v(i, j) * v(i, j);
    }
    out.mean[j] = m;
    out.variance[j] = std::max(0.0, prior - q);
  }
  return out;
}

double mean_squared_error(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("mean_squared_error: length mismatch");
  if (a.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

GprFit fit_gpr(const SplitDataset& data, const KernelHyperparams& hyp0, const GprFitConfig& cfg) {
  if (cfg.epochs < 1) throw InvalidArgument("fit_gpr: epochs must be >= 1");
  GprFit fit;
  fit.hyp = hyp0;
  fit.trace.model = "gpr";
  fit.trace.key = data.meta.key;
  Vector theta = hyp0.pack();
  Adam adam(theta.size(), cfg.adam);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (std::size_t e = 0;; ++e) {
    const KernelHyperparams hyp = KernelHyperparams::unpack(theta);
    GprEpoch rec;
    rec.hyp = hyp;
    rec.lml = lml(data.train_x, data.train_y, hyp);
    if (!std::isfinite(rec.lml.total)) throw Divergence("fit_gpr: non-finite marginal likelihood at epoch " + std::to_string(e));
    rec.train_mse = mean_squared_error(predict(data.train_x, data.train_y, hyp, data.train_x).mean, data.train_y);
    rec.val_mse = data.n_val() ? mean_squared_error(predict(data.train_x, data.train_y, hyp, data.val_x).mean, data.val_y)
                               : nan;
    TraceRow row;
    row.epoch = e;
    row.data_fit = rec.lml.data_fit;
    row.complexity = rec.lml.complexity;
    row.train_loss = row.data_fit + row.complexity;
    row.train_acc = nan;
    row.val_acc = nan;
    fit.trace.rows.push_back(row);
    fit.epochs.push_back(std::move(rec));
    fit.hyp = hyp;
    if (e == cfg.epochs) break;

    Vector g = lml_grad(data.train_x, data.train_y, hyp);
    for (double& v : g) v = -v;  // Adam minimises
    if (!cfg.learn_noise) g.back() = 0.0;
    adam.step(theta, g);
  }
  return fit;
}

Vector log_space(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw InvalidArgument("log_space: bounds must be positive");
  Vector out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

KernelHyperparams preset_helc(std::size_t d) { return KernelHyperparams::isotropic(d, 3.0, 0.01, 0.1); }
KernelHyperparams preset_lehc(std::size_t d) { return KernelHyperparams::isotropic(d, 0.05, 2.0, 0.1); }
KernelHyperparams preset_lelc(std::size_t d) { return KernelHyperparams::isotropic(d, 1.0, 1.0, 0.1); }

std::vector<NamedInit> default_landscape_inits(std::size_t d) {
  return {{"A", preset_helc(d)}, {"B", preset_lehc(d)}, {"C", preset_lelc(d)}};
}

LandscapeScan landscape_scan(const SplitDataset& data, const GridConfig& grid, double noise,
                             const std::vector<NamedInit>& inits, const GprFitConfig& cfg) {
  const std::size_t d = data.train_x.cols();
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
    const auto hyp = KernelHyperparams::isotropic(d, scan.axis_lengthscale[i], scan.axis_amplitude[j], noise);
    const LmlBreakdown b = lml(data.train_x, data.train_y, hyp);
    scan.data_fit(i, j) = b.data_fit;
    scan.complexity(i, j) = b.complexity;
    scan.total(i, j) = b.total;
  }

  GprFitConfig fcfg = cfg;
  fcfg.learn_noise = false;
  for (const auto& init : inits) {
    KernelHyperparams h0 = init.hyp;
    h0.log_noise = std::log(noise);
    const GprFit fit = fit_gpr(data, h0, fcfg);
    Trajectory t;
    t.label = init.label;
    for (std::size_t s = 0; s < fit.epochs.size(); ++s) {
      const GprEpoch& e = fit.epochs[s];
      t.points.push_back({s, e.hyp.mean_lengthscale(), e.hyp.amplitude(), e.lml.data_fit, e.lml.complexity, e.lml.total,
                          e.val_mse, e.train_mse});
    }
    scan.trajectories.push_back(std::move(t));
  }
  return scan;
}

DelayedDrop detect_delayed_drop(const std::vector<double>& train_mse, const std::vector<double>& val_mse,
                                double tolerance, double drop, std::size_t min_delay) {
  if (train_mse.size() != val_mse.size()) throw DimensionMismatch("detect_delayed_drop: series lengths differ");
  DelayedDrop out;
  if (train_mse.empty()) return out;
  const double bound = (1.0 + tolerance) * train_mse.back();
  std::size_t start = train_mse.size();
  while (start > 0 && train_mse[start - 1] <= bound) --start;
  if (start < train_mse.size()) out.e_train = start;
  const double target = (1.0 - drop) * val_mse.front();
  for (std::size_t i = 0; i < val_mse.size(); ++i)
    if (val_mse[i] <= target) {
      out.e_val = i;
      break;
    }
  out.delayed = out.e_train && out.e_val && *out.e_val >= *out.e_train + min_delay;
  return out;
}

}  // namespace grok
