#pragma once

#include <vector>

#include "groklab/datasets.hpp"
#include "groklab/linalg.hpp"
#include "groklab/trace.hpp"

namespace grok {

// Independent Gaussian prior on each weight. sigma0 holds prior variances.
struct GaussianPriorSpec {
  Vector mu0;
  Vector sigma0;
  double eps0 = 0.1;  // noise variance scaling the data fit

  static GaussianPriorSpec isotropic(std::size_t d, double mu, double sigma, double eps0);
};

struct LinearLoss {
  double data_fit = 0.0;    // MSE / eps0
  double complexity = 0.0;  // sum_i (w_i - mu0_i)^2 / sigma0_i
  double total = 0.0;
};

LinearLoss lr_loss(const Vector& w, const GaussianPriorSpec& prior, const Matrix& x, const Vector& y);
Vector lr_grad(const Vector& w, const GaussianPriorSpec& prior, const Matrix& x, const Vector& y);

// Label 1 where x.w > 0, else 0 (an exact zero maps to 0).
std::vector<int> classify(const Vector& w, const Matrix& x);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& labels);

struct LinearConfig {
  double eps0 = 0.1;
  double sigma0 = 0.5;
  double mu0 = 0.0;
  Vector init_w = {5e-4, 0.9, 0.9, 0.9};
  double lr = 1e-2;
  std::size_t epochs = 5000;
};

struct LinearFit {
  TrainingTrace trace;
  Vector w;
};

// Full-batch gradient descent on lr_loss. `data` must already hold the model
// inputs (e.g. expanded slope features) in train_x/val_x, regression targets
// in train_y and class labels in *_labels.
LinearFit fit_lr(const SplitDataset& data, const GaussianPriorSpec& prior, const Vector& init, double lr,
                 std::size_t epochs);

// Slope task with the four-feature expansion applied to both splits.
SplitDataset slope_task(std::size_t n_train, std::size_t n_val, const StreamKey& key);

}  // namespace grok
