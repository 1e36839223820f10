#include "groklab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <omp.h>

#include "groklab/errors.hpp"

namespace grok {

std::optional<std::size_t> first_index_above(const std::vector<double>& series, double gamma) {
  for (std::size_t i = 0; i < series.size(); ++i)
    if (series[i] >= gamma) return i;
  return std::nullopt;
}

GrokkingMeasurement measure_gap(const TrainingTrace& trace, double gamma) {
  if (trace.empty()) throw InvalidArgument("measure_gap: empty trace");
  GrokkingMeasurement m;
  m.gamma = gamma;
  m.e_train = first_index_above(trace.train_acc(), gamma);
  m.e_val = first_index_above(trace.val_acc(), gamma);
  // Report epochs rather than row indices; rows are contiguous from 0 but
  // this keeps the measurement correct for sliced traces too.
  if (m.e_train) m.e_train = trace.rows[*m.e_train].epoch;
  if (m.e_val) m.e_val = trace.rows[*m.e_val].epoch;
  m.censored = !(m.e_train && m.e_val);
  if (!m.censored) {
    m.delta_signed = static_cast<long long>(*m.e_val) - static_cast<long long>(*m.e_train);
    m.delta_abs = std::llabs(m.delta_signed);
  }
  return m;
}

std::vector<double> normalize_gaps(const std::vector<double>& gaps) {
  if (gaps.empty()) return {};
  const auto [lo, hi] = std::minmax_element(gaps.begin(), gaps.end());
  const double range = *hi - *lo;
  std::vector<double> out(gaps.size(), 0.0);
  if (range == 0.0) return out;
  for (std::size_t i = 0; i < gaps.size(); ++i) out[i] = (gaps[i] - *lo) / range;
  return out;
}

namespace {

StreamKey cell_base(std::uint64_t master_seed, const std::string& dataset, std::size_t seed) {
  return StreamKey(master_seed, {std::string("sweep"), dataset, static_cast<std::int64_t>(seed)});
}

}  // namespace

StreamKey sweep_cell_key(std::uint64_t master_seed, const std::string& dataset, std::size_t extra_dims,
                         std::size_t seed) {
  return cell_base(master_seed, dataset, seed).child(extra_dims);
}

SplitDataset sweep_cell_data(const SweepConfig& cfg, ModularOp op, std::size_t extra_dims, std::size_t seed) {
  // The base dataset depends only on (dataset, seed), so every length of a
  // seed conceals the same examples.
  const StreamKey base = cell_base(cfg.master_seed, to_string(op), seed);
  SplitDataset d = cfg.split == ModularSplit::partition
                       ? gen_modular(op, cfg.prime, cfg.train_fraction, base.child("data"))
                       : gen_modular_sampled(op, cfg.prime, cfg.n_train, cfg.n_val, base.child("data"));
  return conceal(std::move(d), extra_dims, base.child("conceal").child(extra_dims));
}

MlpFit run_sweep_cell(const SweepConfig& cfg, ModularOp op, std::size_t extra_dims, std::size_t seed) {
  const SplitDataset d = sweep_cell_data(cfg, op, extra_dims, seed);
  const StreamKey base = cell_base(cfg.master_seed, to_string(op), seed);
  return fit_mlp(d, cfg.mlp, base.child("model").child(extra_dims));
}

std::vector<SweepAggregate> aggregate_cells(const std::vector<SweepCell>& cells) {
  std::vector<SweepAggregate> out;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index;
  std::vector<std::vector<double>> gaps;
  for (const auto& c : cells) {
    const auto k = std::make_pair(c.dataset, c.extra_dims);
    auto it = index.find(k);
    if (it == index.end()) {
      it = index.emplace(k, out.size()).first;
      out.push_back({c.dataset, c.extra_dims});
      gaps.emplace_back();
    }
    SweepAggregate& a = out[it->second];
    if (c.failed)
      ++a.n_failed;
    else if (c.gap.censored)
      ++a.n_censored;
    else
      gaps[it->second].push_back(static_cast<double>(c.gap.delta_signed));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& g = gaps[i];
    out[i].n_used = g.size();
    if (g.empty()) {
      out[i].avg_gap = std::numeric_limits<double>::quiet_NaN();
      out[i].std_gap = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    double s = 0.0;
    for (double v : g) s += v;
    const double mean = s / static_cast<double>(g.size());
    double ss = 0.0;
    for (double v : g) ss += (v - mean) * (v - mean);
    out[i].avg_gap = mean;
    out[i].std_gap = std::sqrt(ss / static_cast<double>(g.size()));
  }
  return out;
}

SweepResult concealment_sweep(const SweepConfig& cfg) {
  struct Task {
    ModularOp op;
    std::size_t length;
    std::size_t seed;
  };
  std::vector<Task> tasks;
  for (ModularOp op : cfg.datasets)
    for (std::size_t l : cfg.lengths)
      for (std::size_t s = 0; s < cfg.seeds; ++s) tasks.push_back({op, l, s});

  SweepResult result;
  result.cells.resize(tasks.size());
  SweepConfig run_cfg = cfg;
  run_cfg.mlp.stop_gamma = cfg.gamma;  // rows after both crossings cannot change the gap

  const int threads = cfg.jobs > 0 ? cfg.jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads != 1)
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    SweepCell& cell = result.cells[i];
    cell.dataset = to_string(t.op);
    cell.extra_dims = t.length;
    cell.seed = t.seed;
    try {
      const MlpFit fit = run_sweep_cell(run_cfg, t.op, t.length, t.seed);
      cell.gap = measure_gap(fit.trace, cfg.gamma);
    } catch (const std::exception& e) {
      cell.failed = true;
      cell.error = e.what();
    }
  }
  result.aggregates = aggregate_cells(result.cells);
  return result;
}

}  // namespace grok
