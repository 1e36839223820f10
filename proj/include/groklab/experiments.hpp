#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "groklab/config.hpp"
#include "groklab/io.hpp"
#include "groklab/stats.hpp"

namespace grok {

struct RunOptions {
  std::filesystem::path out;
  int jobs = 0;  // 0: OpenMP default. Never changes any output byte.
};

// Key of the data used by `gen` and `train` for one seed.
StreamKey data_key(std::uint64_t master_seed, std::size_t seed);

// Each writes its outputs plus run_manifest.json under opts.out.
void run_gen(const ExperimentConfig& cfg, const RunOptions& opts);
void run_train(const ExperimentConfig& cfg, const RunOptions& opts);
void run_sweep(const ExperimentConfig& cfg, const RunOptions& opts);
void run_landscape(const ExperimentConfig& cfg, const RunOptions& opts);
void run_bnn_sweep(const ExperimentConfig& cfg, const RunOptions& opts);

struct GapStats {
  std::optional<CorrelationResult> correlation;  // l against ln delta
  std::optional<RegressionFit> fit;
  std::size_t n = 0;
  std::string error;  // why correlation or fit is missing
};

struct SweepStats {
  GapStats combined;
  std::map<std::string, GapStats> per_dataset;
};

// Uses uncensored rows with delta_signed > 0.
SweepStats sweep_stats(const CsvTable& sweep);
std::string stats_json(const SweepStats& s);

// `in` is a sweep.csv or a directory holding one.
void run_stats(const std::filesystem::path& in, const std::filesystem::path& out);
// Renders every figure the files under `in` support.
void run_report(const std::filesystem::path& in, const std::filesystem::path& out);

}  // namespace grok
