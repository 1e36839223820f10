#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "groklab/datasets.hpp"
#include "groklab/mlp_model.hpp"
#include "groklab/prng.hpp"
#include "groklab/trace.hpp"

namespace grok {

inline constexpr double kDefaultGamma = 0.95;

std::optional<std::size_t> first_index_above(const std::vector<double>& series, double gamma = kDefaultGamma);

struct GrokkingMeasurement {
  std::optional<std::size_t> e_train;
  std::optional<std::size_t> e_val;
  long long delta_signed = 0;  // e_val - e_train, 0 when censored
  long long delta_abs = 0;
  double gamma = kDefaultGamma;
  bool censored = true;
};

GrokkingMeasurement measure_gap(const TrainingTrace& trace, double gamma = kDefaultGamma);

// (g - min) / (max - min); all-equal input maps to zeros.
std::vector<double> normalize_gaps(const std::vector<double>& gaps);

// How the sweep builds each modular dataset.
enum class ModularSplit {
  partition,  // disjoint split of the operand grid by train_fraction
  sampled,    // both splits drawn with replacement from the grid
};

struct SweepConfig {
  std::vector<ModularOp> datasets;
  std::vector<std::size_t> lengths;
  std::size_t seeds = 3;
  int prime = 7;
  ModularSplit split = ModularSplit::sampled;
  double train_fraction = 0.5;  // partition split
  std::size_t n_train = 1600;   // sampled split
  std::size_t n_val = 200;
  MlpConfig mlp{};
  double gamma = kDefaultGamma;
  std::uint64_t master_seed = 0;
  int jobs = 0;  // 0: OpenMP default
};

struct SweepCell {
  std::string dataset;
  std::size_t extra_dims = 0;
  std::size_t seed = 0;
  GrokkingMeasurement gap;
  bool failed = false;
  std::string error;
};

struct SweepAggregate {
  std::string dataset;
  std::size_t extra_dims = 0;
  double avg_gap = 0.0;  // NaN when every cell is censored or failed
  double std_gap = 0.0;  // population standard deviation
  std::size_t n_used = 0;
  std::size_t n_censored = 0;
  std::size_t n_failed = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // ordered by (dataset, length, seed)
  std::vector<SweepAggregate> aggregates;
};

// Key of one sweep cell; every random draw of the cell derives from it.
StreamKey sweep_cell_key(std::uint64_t master_seed, const std::string& dataset, std::size_t extra_dims,
                         std::size_t seed);
// Dataset and training of one cell; exposed for the `train` path and tests.
SplitDataset sweep_cell_data(const SweepConfig& cfg, ModularOp op, std::size_t extra_dims, std::size_t seed);
MlpFit run_sweep_cell(const SweepConfig& cfg, ModularOp op, std::size_t extra_dims, std::size_t seed);

SweepResult concealment_sweep(const SweepConfig& cfg);
std::vector<SweepAggregate> aggregate_cells(const std::vector<SweepCell>& cells);

}  // namespace grok
