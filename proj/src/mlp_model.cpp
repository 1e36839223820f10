#include "groklab/mlp_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "groklab/errors.hpp"
#include "groklab/linear_model.hpp"

namespace grok {

MlpParams MlpParams::zeros(std::size_t input, std::size_t hidden, std::size_t classes) {
  return {Matrix(hidden, input), Vector(hidden, 0.0), Matrix(classes, hidden), Vector(classes, 0.0)};
}

std::size_t MlpParams::size() const { return w1.data().size() + b1.size() + w2.data().size() + b2.size(); }

void MlpParams::for_each(const std::function<void(std::vector<double>&)>& f) {
  f(w1.data());
  f(b1);
  f(w2.data());
  f(b2);
}

void MlpParams::for_each(const std::function<void(const std::vector<double>&)>& f) const {
  f(w1.data());
  f(b1);
  f(w2.data());
  f(b2);
}

double MlpParams::squared_norm() const {
  double s = 0.0;
  for_each([&](const std::vector<double>& t) {
    for (double v : t) s += v * v;
  });
  return s;
}

MlpParams init_mlp(std::size_t input, std::size_t hidden, std::size_t classes, double scale, Stream& stream) {
  MlpParams p = MlpParams::zeros(input, hidden, classes);
  const double s1 = scale / std::sqrt(static_cast<double>(input));
  const double s2 = scale / std::sqrt(static_cast<double>(hidden));
  for (double& v : p.w1.data()) v = s1 * stream.standard_normal();
  for (double& v : p.w2.data()) v = s2 * stream.standard_normal();
  return p;
}

namespace {

void check_input(const MlpParams& p, const Matrix& x) {
  if (x.cols() != p.input_dim())
    throw DimensionMismatch("mlp: input has " + std::to_string(x.cols()) + " columns, expected " +
                            std::to_string(p.input_dim()));
}

// Hidden pre-activations W1 x + b1, one row per example.
Matrix hidden_pre(const MlpParams& p, const Matrix& x) {
  Matrix z = matmul_nt(x, p.w1);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    auto zi = z.row(i);
    for (std::size_t j = 0; j < zi.size(); ++j) zi[j] += p.b1[j];
  }
  return z;
}

Matrix relu(Matrix z) {
  for (double& v : z.data()) v = v > 0.0 ? v : 0.0;
  return z;
}

Matrix output_layer(const MlpParams& p, const Matrix& h) {
  Matrix logits = matmul_nt(h, p.w2);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto li = logits.row(i);
    for (std::size_t c = 0; c < li.size(); ++c) li[c] += p.b2[c];
  }
  return logits;
}

// Softmax probabilities and per-row negative log-likelihood.
double softmax_ce(const Matrix& logits, const std::vector<int>& labels, Matrix* probs) {
  if (labels.size() != logits.rows()) throw DimensionMismatch("cross_entropy: label count mismatch");
  double total = 0.0;
  if (probs) *probs = Matrix(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto li = logits.row(i);
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= li.size()) throw InvalidArgument("cross_entropy: label out of range");
    const double m = *std::max_element(li.begin(), li.end());
    double z = 0.0;
    for (double v : li) z += std::exp(v - m);
    const double lse = m + std::log(z);
    total += lse - li[static_cast<std::size_t>(y)];
    if (probs) {
      auto pi = probs->row(i);
      for (std::size_t c = 0; c < li.size(); ++c) pi[c] = std::exp(li[c] - lse);
    }
  }
  return total / static_cast<double>(logits.rows());
}

}  // namespace

Matrix mlp_forward(const MlpParams& params, const Matrix& x) {
  check_input(params, x);
  return output_layer(params, relu(hidden_pre(params, x)));
}

std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(logits.rows());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto li = logits.row(i);
    out[i] = static_cast<int>(std::max_element(li.begin(), li.end()) - li.begin());
  }
  return out;
}

double cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
  return softmax_ce(logits, labels, nullptr);
}

CrossEntropyGrad ce_loss_grad(const MlpParams& p, const Matrix& x, const std::vector<int>& labels) {
  check_input(p, x);
  const Matrix z = hidden_pre(p, x);
  const Matrix h = relu(z);
  const Matrix logits = output_layer(p, h);

  CrossEntropyGrad out;
  Matrix dlogits;
  out.ce = softmax_ce(logits, labels, &dlogits);
  out.logits = logits;
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (std::size_t i = 0; i < dlogits.rows(); ++i) {
    dlogits(i, static_cast<std::size_t>(labels[i])) -= 1.0;
    for (double& v : dlogits.row(i)) v *= inv_n;
  }

  out.grads.w2 = matmul_tn(dlogits, h);
  out.grads.b2.assign(p.classes(), 0.0);
  for (std::size_t i = 0; i < dlogits.rows(); ++i)
    for (std::size_t c = 0; c < p.classes(); ++c) out.grads.b2[c] += dlogits(i, c);

  Matrix dz = matmul(dlogits, p.w2);
  for (std::size_t k = 0; k < dz.data().size(); ++k)
    if (!(z.data()[k] > 0.0)) dz.data()[k] = 0.0;

  out.grads.w1 = matmul_tn(dz, x);
  out.grads.b1.assign(p.hidden(), 0.0);
  for (std::size_t i = 0; i < dz.rows(); ++i) {
    auto di = dz.row(i);
    for (std::size_t j = 0; j < di.size(); ++j) out.grads.b1[j] += di[j];
  }
  return out;
}

MlpLossGrad mlp_loss_grad(const MlpParams& params, const Matrix& x, const std::vector<int>& labels,
                          double weight_decay) {
  CrossEntropyGrad ce = ce_loss_grad(params, x, labels);
  MlpLossGrad out;
  out.ce = ce.ce;
  out.squared_norm = params.squared_norm();
  out.loss = out.ce + 0.5 * weight_decay * out.squared_norm;
  out.grads = std::move(ce.grads);
  out.logits = std::move(ce.logits);
  auto add_decay = [weight_decay](std::vector<double>& g, const std::vector<double>& w) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += weight_decay * w[i];
  };
  add_decay(out.grads.w1.data(), params.w1.data());
  add_decay(out.grads.b1, params.b1);
  add_decay(out.grads.w2.data(), params.w2.data());
  add_decay(out.grads.b2, params.b2);
  return out;
}

namespace {

Matrix gather_rows(const Matrix& x, const std::vector<std::size_t>& idx) {
  Matrix out(idx.size(), x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = x.row(idx[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void sgd_step(MlpParams& p, const MlpParams& g, double lr) {
  auto upd = [lr](std::vector<double>& w, const std::vector<double>& d) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * d[i];
  };
  upd(p.w1.data(), g.w1.data());
  upd(p.b1, g.b1);
  upd(p.w2.data(), g.w2.data());
  upd(p.b2, g.b2);
}

}  // namespace

MlpFit fit_mlp(const SplitDataset& data, const MlpConfig& cfg, const StreamKey& key) {
  if (cfg.epochs < 1) throw InvalidArgument("fit_mlp: epochs must be >= 1");
  if (data.meta.num_classes < 2) throw InvalidArgument("fit_mlp: dataset is not a classification task");
  Stream init_stream(key.child("init"));
  Stream batch_stream(key.child("batches"));

  MlpFit fit;
  fit.params = init_mlp(data.train_x.cols(), cfg.hidden, data.meta.num_classes, cfg.init_scale, init_stream);
  fit.trace.model = "mlp";
  fit.trace.key = key;

  const std::size_t n = data.n_train();
  const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= n;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  bool train_crossed = false, val_crossed = false;
  for (std::size_t e = 0;; ++e) {
    MlpLossGrad lg = mlp_loss_grad(fit.params, data.train_x, data.train_labels, cfg.weight_decay);
    if (!std::isfinite(lg.loss)) throw Divergence("fit_mlp: loss became non-finite at epoch " + std::to_string(e));
    TraceRow row;
    row.epoch = e;
    row.train_loss = lg.loss;
    row.data_fit = lg.ce;
    row.complexity = lg.squared_norm;
    row.train_acc = accuracy(argmax_rows(lg.logits), data.train_labels);
    row.val_acc = accuracy(argmax_rows(mlp_forward(fit.params, data.val_x)), data.val_labels);
    fit.trace.rows.push_back(row);
    if (e == cfg.epochs) break;
    if (cfg.stop_gamma) {
      train_crossed = train_crossed || row.train_acc >= *cfg.stop_gamma;
      val_crossed = val_crossed || row.val_acc >= *cfg.stop_gamma;
      if (train_crossed && val_crossed) break;
    }

    if (full_batch) {
      sgd_step(fit.params, lg.grads, cfg.lr);
      continue;
    }
    batch_stream.shuffle(order.begin(), order.end());
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                   order.begin() + static_cast<std::ptrdiff_t>(end));
      std::vector<int> labels;
      for (auto i : idx) labels.push_back(data.train_labels[i]);
      const MlpLossGrad b = mlp_loss_grad(fit.params, gather_rows(data.train_x, idx), labels, cfg.weight_decay);
      sgd_step(fit.params, b.grads, cfg.lr);
    }
  }
  return fit;
}

}  // namespace grok
