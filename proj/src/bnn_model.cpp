#include "groklab/bnn_model.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <omp.h>

#include "groklab/errors.hpp"
#include "groklab/linear_model.hpp"

namespace grok {

namespace {

std::array<std::vector<double>*, 4> tensors(MlpParams& p) { return {&p.w1.data(), &p.b1, &p.w2.data(), &p.b2}; }
std::array<const std::vector<double>*, 4> tensors(const MlpParams& p) {
  return {&p.w1.data(), &p.b1, &p.w2.data(), &p.b2};
}

MlpParams same_shape(const MlpParams& p) { return MlpParams::zeros(p.input_dim(), p.hidden(), p.classes()); }

void check_shapes(const BnnVariationalParams& phi) {
  if (phi.mean.w1.rows() != phi.log_std.w1.rows() || phi.mean.w1.cols() != phi.log_std.w1.cols() ||
      phi.mean.w2.rows() != phi.log_std.w2.rows() || phi.mean.b1.size() != phi.log_std.b1.size() ||
      phi.mean.b2.size() != phi.log_std.b2.size())
    throw DimensionMismatch("bnn: mean and log-std shapes differ");
}

MlpParams draw_noise(const MlpParams& shape, Stream& stream) {
  MlpParams eps = same_shape(shape);
  eps.for_each([&](std::vector<double>& t) {
    for (double& v : t) v = stream.standard_normal();
  });
  return eps;
}

MlpParams sample_weights(const BnnVariationalParams& phi, const MlpParams& eps) {
  MlpParams theta = same_shape(phi.mean);
  auto th = tensors(theta);
  auto mu = tensors(phi.mean);
  auto ls = tensors(phi.log_std);
  auto ep = tensors(eps);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < th[k]->size(); ++i) (*th[k])[i] = (*mu[k])[i] + std::exp((*ls[k])[i]) * (*ep[k])[i];
  return theta;
}

// Summed cross-entropy of the sampled network and its gradient wrt theta.
CrossEntropyGrad summed_ce(const MlpParams& theta, const Matrix& x, const std::vector<int>& labels) {
  CrossEntropyGrad g = ce_loss_grad(theta, x, labels);
  const double n = static_cast<double>(x.rows());
  g.ce *= n;
  g.grads.for_each([n](std::vector<double>& t) {
    for (double& v : t) v *= n;
  });
  return g;
}

// Adds the data term of one noise draw into `out`, scaled by `w`.
void accumulate_data_grad(const BnnVariationalParams& phi, const MlpParams& eps, const MlpParams& g_theta, double w,
                          BnnGrad& out) {
  auto ls = tensors(phi.log_std);
  auto ep = tensors(eps);
  auto gt = tensors(g_theta);
  auto gm = tensors(out.mean);
  auto gs = tensors(out.log_std);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < gt[k]->size(); ++i) {
      const double g = (*gt[k])[i];
      (*gm[k])[i] += w * g;
      (*gs[k])[i] += w * g * (*ep[k])[i] * std::exp((*ls[k])[i]);
    }
}

void add_kl_grad(const BnnVariationalParams& phi, BnnGrad& out, double weight = 1.0) {
  auto mu = tensors(phi.mean);
  auto ls = tensors(phi.log_std);
  auto gm = tensors(out.mean);
  auto gs = tensors(out.log_std);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < mu[k]->size(); ++i) {
      (*gm[k])[i] += weight * (*mu[k])[i];
      (*gs[k])[i] += weight * (std::exp(2.0 * (*ls[k])[i]) - 1.0);
    }
}

}  // namespace

double bnn_kl(const BnnVariationalParams& phi) {
  check_shapes(phi);
  auto mu = tensors(phi.mean);
  auto ls = tensors(phi.log_std);
  double kl = 0.0;
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < mu[k]->size(); ++i) {
      const double m = (*mu[k])[i];
      const double r = (*ls[k])[i];
      kl += 0.5 * (std::exp(2.0 * r) + m * m - 1.0 - 2.0 * r);
    }
  return kl;
}

BnnObjective bnn_objective_fixed(const BnnVariationalParams& phi, const Matrix& x, const std::vector<int>& labels,
                                 const MlpParams& eps) {
  check_shapes(phi);
  BnnObjective out;
  out.expected_ce = static_cast<double>(x.rows()) * cross_entropy(mlp_forward(sample_weights(phi, eps), x), labels);
  out.kl = bnn_kl(phi);
  out.total = out.expected_ce + out.kl;
  return out;
}

BnnGrad bnn_grad_fixed(const BnnVariationalParams& phi, const Matrix& x, const std::vector<int>& labels,
                       const MlpParams& eps) {
  check_shapes(phi);
  BnnGrad out{same_shape(phi.mean), same_shape(phi.mean)};
  const CrossEntropyGrad g = summed_ce(sample_weights(phi, eps), x, labels);
  accumulate_data_grad(phi, eps, g.grads, 1.0, out);
  add_kl_grad(phi, out);
  return out;
}

BnnObjective bnn_objective(const BnnVariationalParams& phi, const Matrix& x, const std::vector<int>& labels,
                           std::size_t mc_samples, Stream& stream) {
  if (mc_samples < 1) throw InvalidArgument("bnn_objective: mc_samples must be >= 1");
  check_shapes(phi);
  const double n = static_cast<double>(x.rows());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < mc_samples; ++s) {
    const MlpParams eps = draw_noise(phi.mean, stream);
    const double ce = n * cross_entropy(mlp_forward(sample_weights(phi, eps), x), labels);
    sum += ce;
    sum_sq += ce * ce;
  }
  const double m = static_cast<double>(mc_samples);
  BnnObjective out;
  out.expected_ce = sum / m;
  if (mc_samples > 1) {
    const double var = std::max(0.0, (sum_sq - m * out.expected_ce * out.expected_ce) / (m - 1.0));
    out.expected_ce_stderr = std::sqrt(var / m);
  }
  out.kl = bnn_kl(phi);
  out.total = out.expected_ce + out.kl;
  return out;
}

BnnGrad bnn_grad(const BnnVariationalParams& phi, const Matrix& x, const std::vector<int>& labels,
                 std::size_t mc_samples, Stream& stream, double kl_weight) {
  if (mc_samples < 1) throw InvalidArgument("bnn_grad: mc_samples must be >= 1");
  check_shapes(phi);
  BnnGrad out{same_shape(phi.mean), same_shape(phi.mean)};
  const double w = 1.0 / static_cast<double>(mc_samples);
  for (std::size_t s = 0; s < mc_samples; ++s) {
    const MlpParams eps = draw_noise(phi.mean, stream);
    const CrossEntropyGrad g = summed_ce(sample_weights(phi, eps), x, labels);
    accumulate_data_grad(phi, eps, g.grads, w, out);
  }
  add_kl_grad(phi, out, kl_weight);
  return out;
}

namespace {

Vector flatten(const BnnVariationalParams& phi) {
  Vector v;
  v.reserve(2 * phi.mean.size());
  phi.mean.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  phi.log_std.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  return v;
}

Vector flatten(const BnnGrad& g) {
  Vector v;
  g.mean.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  g.log_std.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  return v;
}

void unflatten(const Vector& v, BnnVariationalParams& phi) {
  std::size_t p = 0;
  auto fill = [&](std::vector<double>& t) {
    for (double& x : t) x = v[p++];
  };
  phi.mean.for_each(fill);
  phi.log_std.for_each(fill);
}

std::vector<int> mc_predict(const BnnVariationalParams& phi, const Matrix& x, std::size_t samples, Stream& stream) {
  Matrix avg(x.rows(), phi.mean.classes());
  for (std::size_t s = 0; s < samples; ++s) {
    const Matrix logits = mlp_forward(sample_weights(phi, draw_noise(phi.mean, stream)), x);
    for (std::size_t i = 0; i < logits.rows(); ++i) {
      auto li = logits.row(i);
      const double m = *std::max_element(li.begin(), li.end());
      double z = 0.0;
      for (double v : li) z += std::exp(v - m);
      for (std::size_t c = 0; c < li.size(); ++c) avg(i, c) += std::exp(li[c] - m) / z;
    }
  }
  return argmax_rows(avg);
}

}  // namespace

BnnFit fit_bnn(const SplitDataset& data, double init_sigma, const BnnConfig& cfg, const StreamKey& key) {
  if (cfg.epochs < 1) throw InvalidArgument("fit_bnn: epochs must be >= 1");
  if (!(cfg.kl_weight > 0.0)) throw InvalidArgument("fit_bnn: kl_weight must be positive");
  if (data.meta.num_classes < 2) throw InvalidArgument("fit_bnn: dataset is not a classification task");
  if (!(init_sigma >= 0.0)) throw InvalidArgument("fit_bnn: init sigma must be non-negative");
  Stream init_stream(key.child("init"));
  Stream train_stream(key.child("train"));
  Stream eval_stream(key.child("eval"));

  BnnFit fit;
  const std::size_t d = data.train_x.cols(), c = data.meta.num_classes;
  fit.phi.mean = MlpParams::zeros(d, cfg.hidden, c);
  fit.phi.mean.for_each([&](std::vector<double>& t) {
    for (double& v : t) v = init_sigma * init_stream.standard_normal();
  });
  fit.phi.log_std = MlpParams::zeros(d, cfg.hidden, c);
  fit.phi.log_std.for_each([&](std::vector<double>& t) { std::fill(t.begin(), t.end(), cfg.init_log_std); });
  fit.trace.model = "bnn";
  fit.trace.key = key;

  Vector theta = flatten(fit.phi);
  Adam adam(theta.size(), cfg.adam);
  for (std::size_t e = 0;; ++e) {
    const BnnObjective obj = bnn_objective(fit.phi, data.train_x, data.train_labels, cfg.eval_mc_samples, eval_stream);
    if (!std::isfinite(obj.total)) throw Divergence("fit_bnn: non-finite objective at epoch " + std::to_string(e));
    TraceRow row;
    row.epoch = e;
    row.data_fit = obj.expected_ce;
    row.complexity = cfg.kl_weight * obj.kl;
    row.train_loss = row.data_fit + row.complexity;
    if (cfg.mc_predictive) {
      row.train_acc = accuracy(mc_predict(fit.phi, data.train_x, cfg.eval_mc_samples, eval_stream), data.train_labels);
      row.val_acc = accuracy(mc_predict(fit.phi, data.val_x, cfg.eval_mc_samples, eval_stream), data.val_labels);
    } else {
      row.train_acc = accuracy(argmax_rows(mlp_forward(fit.phi.mean, data.train_x)), data.train_labels);
      row.val_acc = accuracy(argmax_rows(mlp_forward(fit.phi.mean, data.val_x)), data.val_labels);
    }
    fit.trace.rows.push_back(row);
    if (e == cfg.epochs) break;

    const BnnGrad g = bnn_grad(fit.phi, data.train_x, data.train_labels, cfg.mc_samples, train_stream, cfg.kl_weight);
    adam.step(theta, flatten(g));
    unflatten(theta, fit.phi);
  }
  return fit;
}

std::size_t lehc_epochs(const TrainingTrace& trace, double gamma, double margin) {
  if (trace.empty()) return 0;
  const double bound = (1.0 + margin) * trace.rows.back().complexity;
  std::size_t count = 0;
  for (const auto& r : trace.rows) count += r.train_acc >= gamma && r.complexity > bound;
  return count;
}

std::vector<BnnSweepRun> bnn_init_sweep(const SplitDataset& data, const std::vector<double>& sigmas, std::size_t seeds,
                                        const BnnConfig& cfg, const StreamKey& key, int jobs) {
  std::vector<BnnSweepRun> runs(sigmas.size() * seeds);
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads != 1)
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::size_t si = i / seeds;
    BnnSweepRun& r = runs[i];
    r.sigma = sigmas[si];
    r.seed = i % seeds;
    const BnnFit fit = fit_bnn(data, r.sigma, cfg, key.child("bnn").child(si).child(r.seed));
    r.gap = measure_gap(fit.trace, cfg.gamma);
    r.lehc = lehc_epochs(fit.trace, cfg.gamma);
    r.trace = fit.trace;
  }
  std::vector<double> gaps;
  for (const auto& r : runs)
    if (!r.gap.censored) gaps.push_back(static_cast<double>(r.gap.delta_signed));
  const std::vector<double> norm = normalize_gaps(gaps);
  std::size_t k = 0;
  for (auto& r : runs) r.normalized_gap = r.gap.censored ? std::numeric_limits<double>::quiet_NaN() : norm[k++];
  return runs;
}

}  // namespace grok
