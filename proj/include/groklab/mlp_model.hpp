#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "groklab/datasets.hpp"
#include "groklab/linalg.hpp"
#include "groklab/prng.hpp"
#include "groklab/trace.hpp"

namespace grok {

// One hidden ReLU layer: logits = W2 relu(W1 x + b1) + b2.
struct MlpParams {
  Matrix w1;  // hidden x input
  Vector b1;
  Matrix w2;  // classes x hidden
  Vector b2;

  static MlpParams zeros(std::size_t input, std::size_t hidden, std::size_t classes);

  std::size_t input_dim() const { return w1.cols(); }
  std::size_t hidden() const { return w1.rows(); }
  std::size_t classes() const { return w2.rows(); }
  std::size_t size() const;

  // Visits the four tensors in a fixed order (w1, b1, w2, b2).
  void for_each(const std::function<void(std::vector<double>&)>& f);
  void for_each(const std::function<void(const std::vector<double>&)>& f) const;

  double squared_norm() const;
};

// He-style normal: N(0, 1) * scale / sqrt(fan_in) for weights, zero biases.
MlpParams init_mlp(std::size_t input, std::size_t hidden, std::size_t classes, double scale, Stream& stream);

Matrix mlp_forward(const MlpParams& params, const Matrix& x);
std::vector<int> argmax_rows(const Matrix& logits);

// Mean softmax cross-entropy of `logits` against labels.
double cross_entropy(const Matrix& logits, const std::vector<int>& labels);

struct CrossEntropyGrad {
  double ce = 0.0;
  MlpParams grads;
  Matrix logits;
};

// Mean cross-entropy and its gradient through softmax and ReLU (no decay).
CrossEntropyGrad ce_loss_grad(const MlpParams& params, const Matrix& x, const std::vector<int>& labels);

struct MlpLossGrad {
  double loss = 0.0;  // ce + (weight_decay / 2) * ||theta||^2
  double ce = 0.0;
  double squared_norm = 0.0;
  MlpParams grads;
  Matrix logits;
};

MlpLossGrad mlp_loss_grad(const MlpParams& params, const Matrix& x, const std::vector<int>& labels,
                          double weight_decay);

struct MlpConfig {
  std::size_t hidden = 1000;
  double lr = 1e-1;
  double weight_decay = 1e-2;
  std::size_t epochs = 1500;
  std::size_t batch_size = 0;  // 0 or >= n_train means full batch
  double init_scale = 1.0;
  // Stop once train and validation accuracy have both reached this value.
  std::optional<double> stop_gamma;
};

struct MlpFit {
  TrainingTrace trace;
  MlpParams params;
};

// Plain SGD. Trace: data_fit = mean CE, complexity = ||theta||^2,
// train_loss = ce + (weight_decay / 2) * complexity. `key` seeds the
// initialisation ("init") and minibatch order ("batches").
MlpFit fit_mlp(const SplitDataset& data, const MlpConfig& cfg, const StreamKey& key);

}  // namespace grok
