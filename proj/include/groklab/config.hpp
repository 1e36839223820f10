#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "groklab/bnn_model.hpp"
#include "groklab/datasets.hpp"
#include "groklab/gp_classification.hpp"
#include "groklab/gp_regression.hpp"
#include "groklab/harness.hpp"
#include "groklab/linear_model.hpp"
#include "groklab/mlp_model.hpp"

namespace grok {

enum class ExperimentKind { train, sweep, landscape, bnn_sweep, stats, gen, report };

const char* to_string(ExperimentKind k);
// Accepts both "bnn_sweep" and "bnn-sweep".
std::optional<ExperimentKind> experiment_from_string(const std::string& s);

struct DatasetSpec {
  std::string name;  // parity | modular | zero_one | zero_one_slope | sine
  // parity
  int k = 3;
  ParitySampling sampling = ParitySampling::automatic;
  // modular
  std::vector<ModularOp> ops{ModularOp::add};
  int p = 7;
  ModularSplit split = ModularSplit::partition;
  double train_fraction = 0.5;
  // sizes (parity, sampled modular, zero_one*, sine)
  std::size_t n_train = 128;
  std::size_t n_val = 128;
  std::size_t extra_dims = 0;
  // zero_one_slope: apply the four-feature expansion
  bool slope_features = true;
  SineParams sine{};
};

struct ModelSpec {
  std::string kind;  // linear | mlp | bnn | gpr | gpc
  // linear
  double mu0 = 0.0;
  double sigma0 = 0.5;
  double eps0 = 0.1;
  Vector init{5e-4, 0.9, 0.9, 0.9};
  // mlp, bnn
  std::size_t hidden = 1000;
  double init_scale = 1.0;
  // bnn
  std::size_t mc_samples = 1;
  std::size_t eval_mc_samples = 16;
  double init_log_std = -3.0;
  double init_sigma = 0.1;
  std::vector<double> sigma_list{0.05, 0.1, 0.2, 0.4};
  bool mc_predictive = false;
  double kl_weight = 1.0;
  // gpr, gpc
  double lengthscale = 1.0;
  double amplitude = 1.0;
  double noise = 0.1;
  bool learn_noise = true;
  double beta = 1.0;
  int quad_order = 20;
};

struct LandscapeInit {
  std::string label;
  double lengthscale = 1.0;
  double amplitude = 1.0;
};

struct OptimizerSpec {
  std::optional<double> lr;
  std::optional<std::size_t> epochs;
  double weight_decay = 1e-2;
  std::size_t batch_size = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::train;
  std::uint64_t master_seed = 0;
  std::size_t seeds = 1;
  std::string output = "out";
  double gamma = kDefaultGamma;
  std::optional<DatasetSpec> dataset;
  std::optional<ModelSpec> model;
  OptimizerSpec optimizer;
  std::vector<std::size_t> lengths{0, 10, 20, 30, 40};  // sweep
  GridConfig grid{};                                   // landscape
  std::vector<LandscapeInit> inits;                    // landscape; empty means the presets
  std::string input;                                   // stats, report

  // Canonical JSON of the resolved configuration (defaults filled in).
  std::string canonical;

  double lr() const;
  std::size_t epochs() const;
};

// Throws ConfigInvalid with the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

SplitDataset make_dataset(const DatasetSpec& spec, const StreamKey& key);
SweepConfig make_sweep_config(const ExperimentConfig& cfg);
MlpConfig make_mlp_config(const ExperimentConfig& cfg);
BnnConfig make_bnn_config(const ExperimentConfig& cfg);
GprFitConfig make_gpr_config(const ExperimentConfig& cfg);
GpcConfig make_gpc_config(const ExperimentConfig& cfg);

}  // namespace grok
