#include "groklab/linear_model.hpp"

#include <cmath>

#include "groklab/errors.hpp"

namespace grok {

GaussianPriorSpec GaussianPriorSpec::isotropic(std::size_t d, double mu, double sigma, double eps0) {
  return {Vector(d, mu), Vector(d, sigma), eps0};
}

namespace {

void check(const Vector& w, const GaussianPriorSpec& prior, const Matrix& x, const Vector& y) {
  if (x.cols() != w.size() || x.rows() != y.size() || prior.mu0.size() != w.size() || prior.sigma0.size() != w.size())
    throw DimensionMismatch("linear model: inconsistent dimensions");
  if (x.rows() == 0) throw InvalidArgument("linear model: empty design");
}

}  // namespace

LinearLoss lr_loss(const Vector& w, const GaussianPriorSpec& prior, const Matrix& x, const Vector& y) {
  check(w, prior, x, y);
  const Vector pred = matvec(x, w);
  double sse = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = pred[i] - y[i];
    sse += r * r;
  }
  LinearLoss out;
  out.data_fit = sse / static_cast<double>(y.size()) / prior.eps0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double dw = w[j] - prior.mu0[j];
    out.complexity += dw * dw / prior.sigma0[j];
  }
  out.total = out.data_fit + out.complexity;
  return out;
}

Vector lr_grad(const Vector& w, const GaussianPriorSpec& prior, const Matrix& x, const Vector& y) {
  check(w, prior, x, y);
  Vector resid = matvec(x, w);
  for (std::size_t i = 0; i < y.size(); ++i) resid[i] -= y[i];
  const double scale = 2.0 / (static_cast<double>(y.size()) * prior.eps0);
  Vector g(w.size(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto xi = x.row(i);
    for (std::size_t j = 0; j < w.size(); ++j) g[j] += xi[j] * resid[i];
  }
  for (std::size_t j = 0; j < w.size(); ++j) g[j] = scale * g[j] + 2.0 * (w[j] - prior.mu0[j]) / prior.sigma0[j];
  return g;
}

std::vector<int> classify(const Vector& w, const Matrix& x) {
  const Vector f = matvec(x, w);
  std::vector<int> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] > 0.0 ? 1 : 0;
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels) {
  if (predicted.size() != labels.size()) throw DimensionMismatch("accuracy: length mismatch");
  if (labels.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hit += predicted[i] == labels[i];
  return static_cast<double>(hit) / static_cast<double>(labels.size());
}

LinearFit fit_lr(const SplitDataset& data, const GaussianPriorSpec& prior, const Vector& init, double lr,
                 std::size_t epochs) {
  if (epochs < 1) throw InvalidArgument("fit_lr: epochs must be >= 1");
  LinearFit fit;
  fit.w = init;
  fit.trace.model = "linear";
  fit.trace.key = data.meta.key;
  fit.trace.rows.reserve(epochs + 1);
  for (std::size_t e = 0; e <= epochs; ++e) {
    const LinearLoss loss = lr_loss(fit.w, prior, data.train_x, data.train_y);
    if (!std::isfinite(loss.total)) throw Divergence("fit_lr: loss became non-finite at epoch " + std::to_string(e));
    TraceRow row;
    row.epoch = e;
    row.data_fit = loss.data_fit;
    row.complexity = loss.complexity;
    row.train_loss = loss.total;
    row.train_acc = accuracy(classify(fit.w, data.train_x), data.train_labels);
    row.val_acc = accuracy(classify(fit.w, data.val_x), data.val_labels);
    fit.trace.rows.push_back(row);
    if (e == epochs) break;
    const Vector g = lr_grad(fit.w, prior, data.train_x, data.train_y);
    for (std::size_t j = 0; j < g.size(); ++j) fit.w[j] -= lr * g[j];
  }
  return fit;
}

SplitDataset slope_task(std::size_t n_train, std::size_t n_val, const StreamKey& key) {
  SplitDataset d = gen_zero_one_slope(n_train, n_val, key);
  d.train_x = expand_slope_features(d.train_x);
  d.val_x = expand_slope_features(d.val_x);
  d.meta.input_dim = 4;
  return d;
}

}  // namespace grok
