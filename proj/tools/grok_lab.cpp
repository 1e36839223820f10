// grok-lab: command-line front end for the experiments.
//
// Exit codes: 0 success, 1 experiment failure, 2 configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "groklab/config.hpp"
#include "groklab/errors.hpp"
#include "groklab/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string in;
  int jobs = 0;
};

void add_common(CLI::App* sub, Flags& f, bool needs_config) {
  auto* c = sub->add_option("--config", f.config, "JSON experiment config");
  if (needs_config) c->required();
  sub->add_option("--seed", f.seed, "override master_seed");
  sub->add_option("--out", f.out, "output directory (overrides the config's output)");
  sub->add_option("--jobs", f.jobs, "worker threads; 0 uses the OpenMP default")->check(CLI::NonNegativeNumber);
}

grok::ExperimentConfig load(const Flags& f, grok::ExperimentKind expected) {
  grok::ExperimentConfig cfg = grok::load_config(f.config);
  if (cfg.experiment != expected)
    throw grok::ConfigInvalid(std::string("experiment: config is for '") + grok::to_string(cfg.experiment) +
                              "' but the subcommand is '" + grok::to_string(expected) + "'");
  if (f.seed) {
    // Re-parse so the canonical form (and its hash) carries the override.
    auto j = nlohmann::json::parse(cfg.canonical);
    j["master_seed"] = *f.seed;
    cfg = grok::parse_config(j.dump());
  }
  return cfg;
}

std::filesystem::path out_dir(const Flags& f, const grok::ExperimentConfig& cfg) {
  return f.out.empty() ? std::filesystem::path(cfg.output) : std::filesystem::path(f.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grok-lab: grokking experiments for linear models, MLPs, BNNs and Gaussian processes"};
  app.set_version_flag("--version", std::string("grok-lab ") + GROKLAB_VERSION);
  app.require_subcommand(1);

  Flags f;
  struct Cmd {
    const char* name;
    const char* help;
    grok::ExperimentKind kind;
  };
  const Cmd cmds[] = {
      {"gen", "generate a dataset split as CSV", grok::ExperimentKind::gen},
      {"train", "train one model per seed and record its trace", grok::ExperimentKind::train},
      {"sweep", "concealment sweep over modular datasets", grok::ExperimentKind::sweep},
      {"landscape", "GP hyperparameter landscape with optimiser trajectories", grok::ExperimentKind::landscape},
      {"bnn-sweep", "BNN initialisation-scale sweep", grok::ExperimentKind::bnn_sweep},
      {"stats", "correlation and regression statistics of a sweep", grok::ExperimentKind::stats},
      {"report", "render SVG figures from experiment outputs", grok::ExperimentKind::report},
  };
  std::map<CLI::App*, grok::ExperimentKind> kinds;
  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    const bool analysis = c.kind == grok::ExperimentKind::stats || c.kind == grok::ExperimentKind::report;
    add_common(sub, f, !analysis);
    if (analysis) sub->add_option("--in", f.in, "input directory or file (overrides the config's input)");
    kinds[sub] = c.kind;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  const grok::ExperimentKind kind = kinds.at(sub);
  try {
    if (f.jobs > 0) omp_set_num_threads(f.jobs);
    if (kind == grok::ExperimentKind::stats || kind == grok::ExperimentKind::report) {
      std::string in = f.in;
      std::string out = f.out;
      if (!f.config.empty()) {
        const auto cfg = load(f, kind);
        if (in.empty()) in = cfg.input;
        if (out.empty()) out = cfg.output;
      }
      if (in.empty()) throw grok::ConfigInvalid("input: missing required field (give --in or a config)");
      if (out.empty()) out = std::filesystem::is_directory(in) ? in : std::filesystem::path(in).parent_path().string();
      if (kind == grok::ExperimentKind::stats)
        grok::run_stats(in, out);
      else
        grok::run_report(in, out);
      return kExitOk;
    }

    const grok::ExperimentConfig cfg = load(f, kind);
    const grok::RunOptions opts{out_dir(f, cfg), f.jobs};
    switch (kind) {
      case grok::ExperimentKind::gen: grok::run_gen(cfg, opts); break;
      case grok::ExperimentKind::train: grok::run_train(cfg, opts); break;
      case grok::ExperimentKind::sweep: grok::run_sweep(cfg, opts); break;
      case grok::ExperimentKind::landscape: grok::run_landscape(cfg, opts); break;
      case grok::ExperimentKind::bnn_sweep: grok::run_bnn_sweep(cfg, opts); break;
      default: break;
    }
    return kExitOk;
  } catch (const grok::ConfigInvalid& e) {
    std::cerr << "grok-lab: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "grok-lab: " << e.what() << "\n";
    return kExitFailure;
  }
}
