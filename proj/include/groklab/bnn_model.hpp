#pragma once

#include <cstddef>
#include <vector>

#include "groklab/datasets.hpp"
#include "groklab/harness.hpp"
#include "groklab/mlp_model.hpp"
#include "groklab/optim.hpp"
#include "groklab/prng.hpp"
#include "groklab/trace.hpp"

namespace grok {

// Mean-field Gaussian over the weights of an MlpParams-shaped network:
// theta = mean + exp(log_std) * eps.
struct BnnVariationalParams {
  MlpParams mean;
  MlpParams log_std;
};

struct BnnObjective {
  // Monte-Carlo estimate of the expected negative log-likelihood summed over
  // the examples, and its standard error across samples.
  double expected_ce = 0.0;
  double expected_ce_stderr = 0.0;
  double kl = 0.0;  // KL(q || N(0, I)) in closed form
  double total = 0.0;  // expected_ce + kl
};

double bnn_kl(const BnnVariationalParams& phi);

BnnObjective bnn_objective(const BnnVariationalParams& phi, const Matrix& x, const std::vector<int>& labels,
                           std::size_t mc_samples, Stream& stream);

struct BnnGrad {
  MlpParams mean;
  MlpParams log_std;
};

// Reparameterised gradient of expected_ce + kl_weight * kl; the KL part is exact.
BnnGrad bnn_grad(const BnnVariationalParams& phi, const Matrix& x, const std::vector<int>& labels,
                 std::size_t mc_samples, Stream& stream, double kl_weight = 1.0);

// Objective and gradient for one explicit noise draw (eps has the shape of
// the network). Used by the fixed-noise gradient check.
BnnObjective bnn_objective_fixed(const BnnVariationalParams& phi, const Matrix& x, const std::vector<int>& labels,
                                 const MlpParams& eps);
BnnGrad bnn_grad_fixed(const BnnVariationalParams& phi, const Matrix& x, const std::vector<int>& labels,
                       const MlpParams& eps);

struct BnnConfig {
  std::size_t hidden = 1000;
  AdamConfig adam{};
  std::size_t epochs = 1500;
  std::size_t mc_samples = 1;       // per training step
  std::size_t eval_mc_samples = 16;  // per trace row
  double init_log_std = -3.0;
  double gamma = kDefaultGamma;
  // Accuracy from the MC-averaged predictive instead of the mean weights.
  bool mc_predictive = false;
  // Weight on the KL term during training. 1 is the plain ELBO; smaller
  // values temper the posterior.
  double kl_weight = 1.0;
};

struct BnnFit {
  // data_fit = expected NLL, complexity = kl_weight * KL, train_loss = their sum.
  TrainingTrace trace;
  BnnVariationalParams phi;
};

// Means start at N(0, init_sigma^2), log-stds at cfg.init_log_std.
BnnFit fit_bnn(const SplitDataset& data, double init_sigma, const BnnConfig& cfg, const StreamKey& key);

// Epochs spent with train accuracy >= gamma while the complexity is above
// (1 + margin) times the run's final complexity.
std::size_t lehc_epochs(const TrainingTrace& trace, double gamma = kDefaultGamma, double margin = 0.2);

struct BnnSweepRun {
  double sigma = 0.0;
  std::size_t seed = 0;
  TrainingTrace trace;
  GrokkingMeasurement gap;
  double normalized_gap = 0.0;  // NaN for censored runs
  std::size_t lehc = 0;
};

std::vector<BnnSweepRun> bnn_init_sweep(const SplitDataset& data, const std::vector<double>& sigmas, std::size_t seeds,
                                        const BnnConfig& cfg, const StreamKey& key, int jobs = 0);

}  // namespace grok
