#include "groklab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <omp.h>

#include "json.hpp"

#include "groklab/bnn_model.hpp"
#include "groklab/errors.hpp"
#include "groklab/gp_classification.hpp"
#include "groklab/gp_regression.hpp"
#include "groklab/harness.hpp"
#include "groklab/linear_model.hpp"
#include "groklab/mlp_model.hpp"
#include "groklab/svg.hpp"

namespace grok {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const DatasetSpec& dataset_of(const ExperimentConfig& c) {
  if (!c.dataset) throw ConfigInvalid("dataset: missing required field");
  return *c.dataset;
}

std::string opt_epoch(const std::optional<std::size_t>& e) { return e ? std::to_string(*e) : ""; }

int thread_count(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

json key_json(const StreamKey& key) {
  json labels = json::array();
  for (const auto& l : key.labels()) {
    if (std::holds_alternative<std::int64_t>(l))
      labels.push_back(std::get<std::int64_t>(l));
    else
      labels.push_back(std::get<std::string>(l));
  }
  return {{"master_seed", key.master_seed()}, {"labels", labels}, {"path", key.to_string()}};
}

// The manifest never mentions --jobs, so it is identical for any thread count.
void write_manifest(const ExperimentConfig& cfg, const fs::path& out, const std::string& command,
                    const StreamKey& key) {
  json m;
  m["tool"] = "grok-lab";
  m["version"] = GROKLAB_VERSION;
  m["command"] = command;
  m["config"] = json::parse(cfg.canonical);
  m["config_hash"] = git_blob_hash(cfg.canonical);
  m["stream_key"] = key_json(key);
  write_text(out / "run_manifest.json", m.dump(2) + "\n");
}

fs::path seed_dir(const fs::path& out, std::size_t seeds, std::size_t s) {
  return seeds == 1 ? out : out / ("seed_" + std::to_string(s));
}

CsvTable split_table(const Matrix& x, const Vector& y, const std::vector<int>& labels) {
  CsvTable t;
  for (std::size_t j = 0; j < x.cols(); ++j) t.header.push_back("x" + std::to_string(j));
  t.header.push_back("y");
  if (!labels.empty()) t.header.push_back("label");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::vector<std::string> row;
    for (std::size_t j = 0; j < x.cols(); ++j) row.push_back(format_double(x(i, j)));
    row.push_back(format_double(y[i]));
    if (!labels.empty()) row.push_back(std::to_string(labels[i]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> gap_fields(const GrokkingMeasurement& g) {
  return {opt_epoch(g.e_train), opt_epoch(g.e_val), g.censored ? "" : std::to_string(g.delta_signed),
          g.censored ? "" : std::to_string(g.delta_abs), g.censored ? "1" : "0"};
}

struct TrainResult {
  TrainingTrace trace;
  std::vector<GprEpoch> gpr_epochs;  // gpr only
  std::string error;
  bool config_error = false;
};

TrainResult train_one(const ExperimentConfig& cfg, const SplitDataset& data, const StreamKey& model_key) {
  const ModelSpec& m = *cfg.model;
  TrainResult r;
  if (m.kind == "linear") {
    const std::size_t d = data.train_x.cols();
    if (m.init.size() != d)
      throw ConfigInvalid("model.init: expected " + std::to_string(d) + " weights for this dataset");
    const auto prior = GaussianPriorSpec::isotropic(d, m.mu0, m.sigma0, m.eps0);
    r.trace = fit_lr(data, prior, m.init, cfg.lr(), cfg.epochs()).trace;
  } else if (m.kind == "mlp") {
    r.trace = fit_mlp(data, make_mlp_config(cfg), model_key).trace;
  } else if (m.kind == "bnn") {
    r.trace = fit_bnn(data, m.init_sigma, make_bnn_config(cfg), model_key).trace;
  } else if (m.kind == "gpr") {
    const auto hyp0 = KernelHyperparams::isotropic(data.train_x.cols(), m.lengthscale, m.amplitude, m.noise);
    GprFit fit = fit_gpr(data, hyp0, make_gpr_config(cfg));
    r.trace = std::move(fit.trace);
    r.gpr_epochs = std::move(fit.epochs);
  } else {
    r.trace = fit_gpc(data, make_gpc_config(cfg)).trace;
  }
  return r;
}

}  // namespace

StreamKey data_key(std::uint64_t master_seed, std::size_t seed) {
  return StreamKey(master_seed, {std::string("data"), static_cast<std::int64_t>(seed)});
}

void run_gen(const ExperimentConfig& cfg, const RunOptions& opts) {
  const DatasetSpec& spec = dataset_of(cfg);
  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    const SplitDataset d = make_dataset(spec, data_key(cfg.master_seed, s));
    const fs::path dir = seed_dir(opts.out, cfg.seeds, s);
    write_csv(dir / "train.csv", split_table(d.train_x, d.train_y, d.train_labels));
    write_csv(dir / "val.csv", split_table(d.val_x, d.val_y, d.val_labels));
  }
  write_manifest(cfg, opts.out, "gen", StreamKey(cfg.master_seed, {std::string("data")}));
}

void run_train(const ExperimentConfig& cfg, const RunOptions& opts) {
  const DatasetSpec& spec = dataset_of(cfg);
  if (!cfg.model) throw ConfigInvalid("model: missing required field");
  std::vector<TrainResult> results(cfg.seeds);
  const int threads = thread_count(opts.jobs);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads) if (threads != 1)
  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    try {
      const StreamKey key = data_key(cfg.master_seed, s);
      const SplitDataset d = make_dataset(spec, key);
      results[s] = train_one(cfg, d, StreamKey(cfg.master_seed, {std::string("train"), static_cast<std::int64_t>(s)}));
    } catch (const ConfigInvalid& e) {
      results[s].error = e.what();
      results[s].config_error = true;
    } catch (const std::exception& e) {
      results[s].error = e.what();
    }
  }
  for (const auto& r : results)
    if (r.config_error) throw ConfigInvalid(r.error);

  const bool regression = cfg.model->kind == "gpr";
  for (std::size_t s = 0; s < cfg.seeds; ++s)
    if (!results[s].error.empty()) std::fprintf(stderr, "seed %zu failed: %s\n", s, results[s].error.c_str());
  CsvTable summary;
  summary.header = regression ? std::vector<std::string>{"seed", "e_train", "e_val", "delayed", "final_train_mse",
                                                         "final_val_mse", "failed"}
                              : std::vector<std::string>{"seed",           "e_train",       "e_val",
                                                         "delta_signed",   "delta_abs",     "censored",
                                                         "final_train_acc", "final_val_acc", "failed"};
  std::size_t failures = 0;
  std::string first_error;
  for (std::size_t s = 0; s < cfg.seeds; ++s) {
    const TrainResult& r = results[s];
    std::vector<std::string> row{std::to_string(s)};
    if (!r.error.empty()) {
      ++failures;
      if (first_error.empty()) first_error = r.error;
      row.resize(summary.header.size());
      row.back() = "1";
      summary.rows.push_back(std::move(row));
      continue;
    }
    const fs::path dir = seed_dir(opts.out, cfg.seeds, s);
    write_trace_csv(r.trace, dir / "trace.csv");
    if (regression) {
      CsvTable g;
      g.header = {"epoch", "lengthscale", "amplitude", "noise", "lml", "train_mse", "val_mse"};
      std::vector<double> tr, va;
      for (std::size_t e = 0; e < r.gpr_epochs.size(); ++e) {
        const GprEpoch& ep = r.gpr_epochs[e];
        g.rows.push_back({std::to_string(e), format_double(ep.hyp.mean_lengthscale()), format_double(ep.hyp.amplitude()),
                          format_double(ep.hyp.noise()), format_double(ep.lml.total), format_double(ep.train_mse),
                          format_double(ep.val_mse)});
        tr.push_back(ep.train_mse);
        va.push_back(ep.val_mse);
      }
      write_csv(dir / "gpr_epochs.csv", g);
      const DelayedDrop dd = detect_delayed_drop(tr, va);
      row.insert(row.end(), {opt_epoch(dd.e_train), opt_epoch(dd.e_val), dd.delayed ? "1" : "0",
                             format_double(tr.back()), format_double(va.back()), "0"});
    } else {
      const auto f = gap_fields(measure_gap(r.trace, cfg.gamma));
      row.insert(row.end(), f.begin(), f.end());
      row.push_back(format_double(r.trace.rows.back().train_acc));
      row.push_back(format_double(r.trace.rows.back().val_acc));
      row.push_back("0");
    }
    summary.rows.push_back(std::move(row));
  }
  write_csv(opts.out / "summary.csv", summary);
  write_manifest(cfg, opts.out, "train", StreamKey(cfg.master_seed, {std::string("train")}));
  if (failures == cfg.seeds) throw Error("every seed failed; first error: " + first_error);
}

void run_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  SweepConfig sc = make_sweep_config(cfg);
  sc.jobs = opts.jobs;
  const SweepResult res = concealment_sweep(sc);

  CsvTable cells;
  cells.header = {"dataset", "extra_dims", "seed", "e_train", "e_val", "delta_signed", "delta_abs", "censored"};
  CsvTable failures;
  failures.header = {"dataset", "extra_dims", "seed", "error"};
  for (const auto& c : res.cells) {
    std::vector<std::string> row{c.dataset, std::to_string(c.extra_dims), std::to_string(c.seed)};
    if (c.failed) {
      row.insert(row.end(), {"", "", "", "", "1"});
      std::string msg = c.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      failures.rows.push_back({c.dataset, std::to_string(c.extra_dims), std::to_string(c.seed), msg});
    } else {
      const auto f = gap_fields(c.gap);
      row.insert(row.end(), f.begin(), f.end());
    }
    cells.rows.push_back(std::move(row));
  }
  write_csv(opts.out / "sweep.csv", cells);
  if (!failures.rows.empty()) write_csv(opts.out / "failures.csv", failures);

  CsvTable agg;
  agg.header = {"dataset", "extra_dims", "avg_gap", "std_gap", "n_used", "n_censored", "n_failed"};
  for (const auto& a : res.aggregates)
    agg.rows.push_back({a.dataset, std::to_string(a.extra_dims), format_double(a.avg_gap), format_double(a.std_gap),
                        std::to_string(a.n_used), std::to_string(a.n_censored), std::to_string(a.n_failed)});
  write_csv(opts.out / "aggregates.csv", agg);
  write_manifest(cfg, opts.out, "sweep", StreamKey(cfg.master_seed, {std::string("sweep")}));
  if (failures.rows.size() == res.cells.size()) throw Error("every sweep cell failed");
}

void run_landscape(const ExperimentConfig& cfg, const RunOptions& opts) {
  const DatasetSpec& spec = dataset_of(cfg);
  const ModelSpec& m = *cfg.model;
  const StreamKey key(cfg.master_seed, {std::string("landscape")});
  const SplitDataset d = make_dataset(spec, key);
  const std::size_t dim = d.train_x.cols();

  std::vector<NamedInit> inits;
  for (const auto& i : cfg.inits) inits.push_back({i.label, KernelHyperparams::isotropic(dim, i.lengthscale, i.amplitude, m.noise)});
  if (inits.empty()) inits = m.kind == "gpr" ? default_landscape_inits(dim) : default_gpc_inits(dim);

  if (opts.jobs > 0) omp_set_num_threads(opts.jobs);
  LandscapeScan scan;
  if (m.kind == "gpr") {
    scan = landscape_scan(d, cfg.grid, m.noise, inits, make_gpr_config(cfg));
  } else {
    scan = laplace_surface(d, cfg.grid, inits, make_gpc_config(cfg));
  }

  CsvTable surf;
  surf.header = {"ls", "amp", "data_fit", "complexity", "total"};
  for (std::size_t i = 0; i < scan.axis_lengthscale.size(); ++i)
    for (std::size_t j = 0; j < scan.axis_amplitude.size(); ++j)
      surf.rows.push_back({format_double(scan.axis_lengthscale[i]), format_double(scan.axis_amplitude[j]),
                           format_double(scan.data_fit(i, j)), format_double(scan.complexity(i, j)),
                           format_double(scan.total(i, j))});
  write_csv(opts.out / "landscape.csv", surf);

  CsvTable traj;
  traj.header = {"label", "step", "ls", "amp", "data_fit", "complexity", "total", "val_mse"};
  CsvTable summary;
  summary.header = {"label", "e_train", "e_val", "delayed"};
  for (const auto& t : scan.trajectories) {
    std::vector<double> tr, va;
    for (const auto& p : t.points) {
      traj.rows.push_back({t.label, std::to_string(p.step), format_double(p.lengthscale), format_double(p.amplitude),
                           format_double(p.data_fit), format_double(p.complexity), format_double(p.total),
                           format_double(p.val_mse)});
      tr.push_back(p.train_mse);
      va.push_back(p.val_mse);
    }
    if (m.kind == "gpr") {
      const DelayedDrop dd = detect_delayed_drop(tr, va);
      summary.rows.push_back({t.label, opt_epoch(dd.e_train), opt_epoch(dd.e_val), dd.delayed ? "1" : "0"});
    }
  }
  write_csv(opts.out / "trajectories.csv", traj);
  if (m.kind == "gpr") write_csv(opts.out / "landscape_summary.csv", summary);
  write_manifest(cfg, opts.out, "landscape", key);
}

void run_bnn_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  const DatasetSpec& spec = dataset_of(cfg);
  const ModelSpec& m = *cfg.model;
  const StreamKey key(cfg.master_seed, {std::string("bnn_sweep")});
  const SplitDataset d = make_dataset(spec, key);
  const auto runs = bnn_init_sweep(d, m.sigma_list, cfg.seeds, make_bnn_config(cfg), key, opts.jobs);

  CsvTable t;
  t.header = {"sigma", "seed", "e_train", "e_val", "delta_signed", "delta_abs", "censored", "normalized_gap",
              "lehc_epochs"};
  CsvTable traj;
  traj.header = {"sigma", "seed", "epoch", "train_loss", "train_acc", "val_acc", "data_fit", "complexity"};
  std::vector<double> lehc, gap;
  for (const auto& r : runs) {
    std::vector<std::string> row{format_double(r.sigma), std::to_string(r.seed)};
    const auto f = gap_fields(r.gap);
    row.insert(row.end(), f.begin(), f.end());
    row.push_back(r.gap.censored ? "" : format_double(r.normalized_gap));
    row.push_back(std::to_string(r.lehc));
    t.rows.push_back(std::move(row));
    for (const auto& x : r.trace.rows)
      traj.rows.push_back({format_double(r.sigma), std::to_string(r.seed), std::to_string(x.epoch),
                           format_double(x.train_loss), format_double(x.train_acc), format_double(x.val_acc),
                           format_double(x.data_fit), format_double(x.complexity)});
    if (!r.gap.censored) {
      lehc.push_back(static_cast<double>(r.lehc));
      gap.push_back(static_cast<double>(r.gap.delta_signed));
    }
  }
  write_csv(opts.out / "bnn_sweep.csv", t);
  write_csv(opts.out / "bnn_trajectories.csv", traj);

  json s{{"n_runs", runs.size()}, {"n_uncensored", gap.size()}};
  try {
    const CorrelationResult c = pearson(lehc, gap);
    s["lehc_vs_gap"] = {{"r", c.r}, {"p", c.p}, {"n", c.n}};
  } catch (const Error& e) {
    s["lehc_vs_gap"] = {{"error", e.what()}};
  }
  write_text(opts.out / "bnn_stats.json", s.dump(2) + "\n");
  write_manifest(cfg, opts.out, "bnn-sweep", key);
}

namespace {

GapStats gap_stats(const std::vector<std::pair<double, double>>& pts) {
  GapStats g;
  g.n = pts.size();
  try {
    std::vector<double> l, lnd;
    for (const auto& [x, delta] : pts) {
      l.push_back(x);
      lnd.push_back(std::log(delta));
    }
    g.correlation = pearson(l, lnd);
    g.fit = log_space_fit(pts);
  } catch (const Error& e) {
    g.error = e.what();
  }
  return g;
}

json gap_json(const GapStats& g) {
  json j{{"n", g.n}};
  if (g.correlation) {
    j["r"] = g.correlation->r;
    j["p"] = g.correlation->p;
  }
  if (g.fit) {
    j["a"] = g.fit->a;
    j["b"] = g.fit->b;
  }
  if (!g.error.empty()) j["error"] = g.error;
  return j;
}

fs::path sweep_csv_of(const fs::path& in) { return fs::is_directory(in) ? in / "sweep.csv" : in; }

}  // namespace

SweepStats sweep_stats(const CsvTable& sweep) {
  const std::size_t c_ds = sweep.column("dataset"), c_l = sweep.column("extra_dims"),
                    c_d = sweep.column("delta_signed"), c_c = sweep.column("censored");
  std::vector<std::pair<double, double>> all;
  std::map<std::string, std::vector<std::pair<double, double>>> per;
  for (const auto& row : sweep.rows) {
    per[row[c_ds]];  // every dataset appears, even with no usable rows
    if (row[c_c] != "0" || row[c_d].empty()) continue;
    const double delta = parse_double(row[c_d]);
    if (!(delta > 0.0)) continue;
    const std::pair<double, double> p{parse_double(row[c_l]), delta};
    all.push_back(p);
    per[row[c_ds]].push_back(p);
  }
  SweepStats s;
  s.combined = gap_stats(all);
  for (const auto& [name, pts] : per) s.per_dataset[name] = gap_stats(pts);
  return s;
}

std::string stats_json(const SweepStats& s) {
  json j;
  j["combined"] = gap_json(s.combined);
  j["per_dataset"] = json::object();
  for (const auto& [name, g] : s.per_dataset) j["per_dataset"][name] = gap_json(g);
  return j.dump(2) + "\n";
}

void run_stats(const fs::path& in, const fs::path& out) {
  const SweepStats s = sweep_stats(read_csv(sweep_csv_of(in)));
  write_text(out / "stats.json", stats_json(s));
}

namespace {

Vector column_values(const CsvTable& t, const std::string& name) {
  const std::size_t c = t.column(name);
  Vector v;
  v.reserve(t.rows.size());
  for (const auto& r : t.rows) v.push_back(r[c].empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(r[c]));
  return v;
}

void report_sweep(const fs::path& in, const fs::path& out) {
  const CsvTable sweep = read_csv(in / "sweep.csv");
  const SweepStats s = sweep_stats(sweep);
  write_text(out / "stats.json", stats_json(s));

  const std::size_t c_ds = sweep.column("dataset"), c_l = sweep.column("extra_dims"),
                    c_d = sweep.column("delta_signed"), c_c = sweep.column("censored");
  std::map<std::string, Series> points;
  double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
  for (const auto& row : sweep.rows) {
    if (row[c_c] != "0" || row[c_d].empty()) continue;
    const double delta = parse_double(row[c_d]);
    if (!(delta > 0.0)) continue;
    Series& ser = points[row[c_ds]];
    ser.label = row[c_ds];
    const double l = parse_double(row[c_l]);
    ser.x.push_back(l);
    ser.y.push_back(delta);
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  std::vector<Series> pts;
  for (auto& [_, ser] : points) pts.push_back(std::move(ser));
  std::vector<Series> curves;
  if (s.combined.fit && lmax > lmin) {
    Series fit{"exp(a l + b)", {}, {}};
    for (int i = 0; i <= 100; ++i) {
      const double l = lmin + (lmax - lmin) * i / 100.0;
      fit.x.push_back(l);
      fit.y.push_back(std::exp(s.combined.fit->a * l + s.combined.fit->b));
    }
    curves.push_back(std::move(fit));
  }
  ChartSpec spec{"Grokking gap against concealment length", "concealment length l", "gap (epochs)", false, true};
  write_text(out / "fig4.svg", scatter_chart(spec, pts, curves));
}

void report_trace(const fs::path& trace_path, const fs::path& out, const std::string& stem) {
  const TrainingTrace t = read_trace_csv(trace_path);
  Vector epoch, tr, va, df, cx;
  for (const auto& r : t.rows) {
    epoch.push_back(static_cast<double>(r.epoch) + 1.0);  // shifted so row 0 fits a log axis
    tr.push_back(r.train_acc);
    va.push_back(r.val_acc);
    df.push_back(r.data_fit);
    cx.push_back(r.complexity);
  }
  const bool has_acc = std::any_of(tr.begin(), tr.end(), [](double v) { return std::isfinite(v); });
  if (has_acc) {
    ChartSpec a{"Accuracy", "epoch + 1", "accuracy", true, false};
    write_text(out / (stem + "accuracy.svg"), line_chart(a, {{"train", epoch, tr}, {"validation", epoch, va}}));
  }
  ChartSpec l{"Error and complexity", "epoch + 1", "value", true, false};
  write_text(out / (stem + "loss.svg"), line_chart(l, {{"data fit", epoch, df}, {"complexity", epoch, cx}}));
}

void report_landscape(const fs::path& in, const fs::path& out) {
  const CsvTable surf = read_csv(in / "landscape.csv");
  const Vector ls = column_values(surf, "ls"), amp = column_values(surf, "amp"), total = column_values(surf, "total");
  Vector xs, ys;
  for (double v : ls)
    if (xs.empty() || xs.back() != v) xs.push_back(v);
  const std::size_t na = ls.empty() ? 0 : surf.rows.size() / xs.size();
  for (std::size_t j = 0; j < na; ++j) ys.push_back(amp[j]);
  // Rows of the heat map follow amplitude (y), columns follow lengthscale (x).
  Matrix z(ys.size(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) z(j, i) = total[i * na + j];

  std::vector<Series> overlays;
  if (fs::exists(in / "trajectories.csv")) {
    const CsvTable traj = read_csv(in / "trajectories.csv");
    const std::size_t c_label = traj.column("label");
    const Vector tl = column_values(traj, "ls"), ta = column_values(traj, "amp");
    for (std::size_t r = 0; r < traj.rows.size(); ++r) {
      if (overlays.empty() || overlays.back().label != traj.rows[r][c_label])
        overlays.push_back({traj.rows[r][c_label], {}, {}});
      overlays.back().x.push_back(tl[r]);
      overlays.back().y.push_back(ta[r]);
    }
  }
  ChartSpec spec{"Objective landscape", "lengthscale", "amplitude", true, true};
  write_text(out / "landscape.svg", heatmap_chart(spec, xs, ys, z, overlays));
}

void report_bnn(const fs::path& in, const fs::path& out) {
  const CsvTable t = read_csv(in / "bnn_sweep.csv");
  const Vector sigma = column_values(t, "sigma"), gap = column_values(t, "normalized_gap"),
               lehc = column_values(t, "lehc_epochs");
  Series g{"runs", {}, {}}, h{"runs", {}, {}};
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (!std::isfinite(gap[i])) continue;
    g.x.push_back(sigma[i]);
    g.y.push_back(gap[i]);
    h.x.push_back(lehc[i]);
    h.y.push_back(gap[i]);
  }
  write_text(out / "bnn_gap.svg",
             scatter_chart({"Normalised grokking gap against init scale", "init sigma", "normalised gap", true, false},
                           {g}, {}));
  write_text(out / "bnn_lehc.svg",
             scatter_chart({"Normalised grokking gap against epochs in LEHC", "epochs in LEHC", "normalised gap"}, {h},
                           {}));
  if (fs::exists(in / "bnn_trajectories.csv")) {
    const CsvTable traj = read_csv(in / "bnn_trajectories.csv");
    const Vector df = column_values(traj, "data_fit"), cx = column_values(traj, "complexity");
    const std::size_t c_s = traj.column("sigma"), c_seed = traj.column("seed");
    std::vector<Series> lines;
    for (std::size_t r = 0; r < traj.rows.size(); ++r) {
      const std::string label = "sigma " + traj.rows[r][c_s] + " seed " + traj.rows[r][c_seed];
      if (lines.empty() || lines.back().label != label) lines.push_back({label, {}, {}});
      lines.back().x.push_back(cx[r]);
      lines.back().y.push_back(df[r]);
    }
    write_text(out / "bnn_trajectories.svg",
               line_chart({"Error against complexity", "complexity", "error", true, true}, lines));
  }
}

}  // namespace

void run_report(const fs::path& in, const fs::path& out) {
  if (!fs::is_directory(in)) throw IoError("report input is not a directory: " + in.string());
  bool any = false;
  if (fs::exists(in / "sweep.csv")) {
    report_sweep(in, out);
    any = true;
  }
  if (fs::exists(in / "trace.csv")) {
    report_trace(in / "trace.csv", out, "");
    any = true;
  }
  std::vector<fs::path> seeds;
  for (const auto& e : fs::directory_iterator(in))
    if (e.is_directory() && e.path().filename().string().rfind("seed_", 0) == 0 && fs::exists(e.path() / "trace.csv"))
      seeds.push_back(e.path());
  std::sort(seeds.begin(), seeds.end());
  for (const auto& s : seeds) {
    report_trace(s / "trace.csv", out, s.filename().string() + "_");
    any = true;
  }
  if (fs::exists(in / "landscape.csv")) {
    report_landscape(in, out);
    any = true;
  }
  if (fs::exists(in / "bnn_sweep.csv")) {
    report_bnn(in, out);
    any = true;
  }
  if (!any) throw IoError("nothing to report in " + in.string());
}

}  // namespace grok
