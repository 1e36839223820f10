#include "groklab/config.hpp"

#include <cmath>
#include <set>

#include "json.hpp"

#include "groklab/errors.hpp"
#include "groklab/io.hpp"

namespace grok {

using json = nlohmann::json;

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::train: return "train";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::landscape: return "landscape";
    case ExperimentKind::bnn_sweep: return "bnn_sweep";
    case ExperimentKind::stats: return "stats";
    case ExperimentKind::gen: return "gen";
    case ExperimentKind::report: return "report";
  }
  return "?";
}

std::optional<ExperimentKind> experiment_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::train, ExperimentKind::sweep, ExperimentKind::landscape, ExperimentKind::bnn_sweep,
                 ExperimentKind::stats, ExperimentKind::gen, ExperimentKind::report})
    if (s == to_string(k)) return k;
  if (s == "bnn-sweep") return ExperimentKind::bnn_sweep;
  return std::nullopt;
}

double ExperimentConfig::lr() const {
  if (optimizer.lr) return *optimizer.lr;
  if (model && model->kind == "mlp") return 0.1;
  return 1e-2;
}

std::size_t ExperimentConfig::epochs() const {
  if (optimizer.epochs) return *optimizer.epochs;
  const std::string kind = model ? model->kind : "";
  if (kind == "linear") return 5000;
  if (kind == "gpr") return 500;
  if (kind == "gpc") return 1000;
  return 1500;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigInvalid(path + ": " + what); }

// Reads fields of one JSON object; finish() rejects any key never asked for.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  void require(const std::string& key) {
    if (!has(key)) fail(at(key), "missing required field");
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return convert<T>(j_.at(key), at(key));
  }
  template <class T>
  T need(const std::string& key) {
    require(key);
    return convert<T>(j_.at(key), at(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown field");
  }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(path, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(path, "expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
        fail(path, "expected a non-negative integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(path, "expected a number");
      const double d = v.get<double>();
      if (!std::isfinite(d)) fail(path, "expected a finite number");
      return d;
    } else {
      if (!v.is_array()) fail(path, "expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(convert<typename T::value_type>(v[i], path + "[" + std::to_string(i) + "]"));
      return out;
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) fail(path, "must be positive");
}
void at_least(std::size_t v, std::size_t lo, const std::string& path) {
  if (v < lo) fail(path, "must be >= " + std::to_string(lo));
}

ModularOp parse_op(const json& v, const std::string& path) {
  const auto name = Fields::convert<std::string>(v, path);
  try {
    return modular_op_from_string(name);
  } catch (const Error&) {
    fail(path, "unknown modular operation '" + name + "'");
  }
}

DatasetSpec parse_dataset(const json& j) {
  Fields f(j, "dataset");
  DatasetSpec d;
  d.name = f.need<std::string>("name");
  d.extra_dims = f.get("extra_dims", d.extra_dims);
  if (d.name == "parity") {
    d.k = static_cast<int>(f.get<std::size_t>("k", 3));
    at_least(static_cast<std::size_t>(d.k), 1, f.at("k"));
    d.n_train = f.get("n_train", d.n_train);
    d.n_val = f.get("n_val", d.n_val);
    const auto s = f.get<std::string>("sampling", "automatic");
    if (s == "automatic")
      d.sampling = ParitySampling::automatic;
    else if (s == "distinct")
      d.sampling = ParitySampling::distinct;
    else if (s == "with_replacement")
      d.sampling = ParitySampling::with_replacement;
    else
      fail(f.at("sampling"), "expected automatic, distinct or with_replacement");
  } else if (d.name == "modular") {
    if (f.has("op") && f.has("ops")) fail(f.at("ops"), "give either op or ops, not both");
    if (f.has("op")) {
      d.ops = {parse_op(f.raw("op"), f.at("op"))};
    } else if (f.has("ops")) {
      const json& ops = f.raw("ops");
      if (!ops.is_array() || ops.empty()) fail(f.at("ops"), "expected a non-empty array");
      d.ops.clear();
      for (std::size_t i = 0; i < ops.size(); ++i) d.ops.push_back(parse_op(ops[i], f.at("ops") + "[" + std::to_string(i) + "]"));
    }
    d.p = static_cast<int>(f.get<std::size_t>("p", 7));
    if (!is_prime(d.p)) fail(f.at("p"), "must be prime");
    const auto split = f.get<std::string>("split", "partition");
    if (split == "partition") {
      d.split = ModularSplit::partition;
      d.train_fraction = f.get("train_fraction", d.train_fraction);
      if (!(d.train_fraction > 0.0 && d.train_fraction < 1.0)) fail(f.at("train_fraction"), "must be in (0, 1)");
    } else if (split == "sampled") {
      d.split = ModularSplit::sampled;
      d.n_train = f.get("n_train", d.n_train);
      d.n_val = f.get("n_val", d.n_val);
    } else {
      fail(f.at("split"), "expected partition or sampled");
    }
  } else if (d.name == "zero_one" || d.name == "zero_one_slope") {
    d.n_train = f.get("n_train", d.n_train);
    d.n_val = f.get("n_val", d.n_val);
    if (d.name == "zero_one_slope") d.slope_features = f.get("slope_features", d.slope_features);
  } else if (d.name == "sine") {
    d.n_train = f.get("n_train", d.n_train);
    d.n_val = f.get("n_val", d.n_val);
    d.sine.amplitude = f.get("amplitude", d.sine.amplitude);
    d.sine.frequency = f.get("frequency", d.sine.frequency);
    d.sine.phase = f.get("phase", d.sine.phase);
    d.sine.noise = f.get("noise", d.sine.noise);
    d.sine.x_min = f.get("x_min", d.sine.x_min);
    d.sine.x_max = f.get("x_max", d.sine.x_max);
    d.sine.x_jitter = f.get("x_jitter", d.sine.x_jitter);
    if (!(d.sine.x_max > d.sine.x_min)) fail(f.at("x_max"), "must exceed x_min");
  } else {
    fail(f.at("name"), "unknown dataset '" + d.name + "'");
  }
  if (d.name != "modular" || d.split == ModularSplit::sampled) {
    at_least(d.n_train, 1, f.at("n_train"));
    at_least(d.n_val, 1, f.at("n_val"));
  }
  f.finish();
  return d;
}

ModelSpec parse_model(const json& j) {
  Fields f(j, "model");
  ModelSpec m;
  m.kind = f.need<std::string>("kind");
  if (m.kind == "linear") {
    m.mu0 = f.get("mu0", m.mu0);
    m.sigma0 = f.get("sigma0", m.sigma0);
    m.eps0 = f.get("eps0", m.eps0);
    positive(m.sigma0, f.at("sigma0"));
    positive(m.eps0, f.at("eps0"));
    m.init = f.get("init", m.init);
  } else if (m.kind == "mlp" || m.kind == "bnn") {
    m.hidden = f.get("hidden", m.hidden);
    at_least(m.hidden, 1, f.at("hidden"));
    if (m.kind == "mlp") {
      m.init_scale = f.get("init_scale", m.init_scale);
      positive(m.init_scale, f.at("init_scale"));
    } else {
      m.mc_samples = f.get("mc_samples", m.mc_samples);
      m.eval_mc_samples = f.get("eval_mc_samples", m.eval_mc_samples);
      at_least(m.mc_samples, 1, f.at("mc_samples"));
      at_least(m.eval_mc_samples, 1, f.at("eval_mc_samples"));
      m.init_log_std = f.get("init_log_std", m.init_log_std);
      m.init_sigma = f.get("init_sigma", m.init_sigma);
      m.sigma_list = f.get("sigma_list", m.sigma_list);
      if (m.sigma_list.empty()) fail(f.at("sigma_list"), "expected a non-empty array");
      for (std::size_t i = 0; i < m.sigma_list.size(); ++i)
        if (m.sigma_list[i] < 0.0) fail(f.at("sigma_list") + "[" + std::to_string(i) + "]", "must be non-negative");
      m.mc_predictive = f.get("mc_predictive", m.mc_predictive);
      m.kl_weight = f.get("kl_weight", m.kl_weight);
      positive(m.kl_weight, f.at("kl_weight"));
    }
  } else if (m.kind == "gpr" || m.kind == "gpc") {
    m.lengthscale = f.get("lengthscale", m.lengthscale);
    m.amplitude = f.get("amplitude", m.amplitude);
    positive(m.lengthscale, f.at("lengthscale"));
    positive(m.amplitude, f.at("amplitude"));
    if (m.kind == "gpr") {
      m.noise = f.get("noise", m.noise);
      positive(m.noise, f.at("noise"));
      m.learn_noise = f.get("learn_noise", m.learn_noise);
    } else {
      m.beta = f.get("beta", m.beta);
      positive(m.beta, f.at("beta"));
      m.quad_order = static_cast<int>(f.get<std::size_t>("quad_order", 20));
      at_least(static_cast<std::size_t>(m.quad_order), 1, f.at("quad_order"));
    }
  } else {
    fail(f.at("kind"), "unknown model kind '" + m.kind + "'");
  }
  f.finish();
  return m;
}

OptimizerSpec parse_optimizer(const json& j) {
  Fields f(j, "optimizer");
  OptimizerSpec o;
  if (f.has("lr")) {
    o.lr = f.get("lr", 0.0);
    positive(*o.lr, f.at("lr"));
  }
  if (f.has("epochs")) {
    o.epochs = f.get<std::size_t>("epochs", 0);
    at_least(*o.epochs, 1, f.at("epochs"));
  }
  o.weight_decay = f.get("weight_decay", o.weight_decay);
  if (o.weight_decay < 0.0) fail(f.at("weight_decay"), "must be non-negative");
  o.batch_size = f.get("batch_size", o.batch_size);
  o.beta1 = f.get("beta1", o.beta1);
  o.beta2 = f.get("beta2", o.beta2);
  o.eps = f.get("eps", o.eps);
  if (!(o.beta1 >= 0.0 && o.beta1 < 1.0)) fail(f.at("beta1"), "must be in [0, 1)");
  if (!(o.beta2 >= 0.0 && o.beta2 < 1.0)) fail(f.at("beta2"), "must be in [0, 1)");
  positive(o.eps, f.at("eps"));
  f.finish();
  return o;
}

GridConfig parse_grid(const json& j) {
  Fields f(j, "grid");
  GridConfig g;
  g.n_lengthscale = f.get("n_lengthscale", g.n_lengthscale);
  g.n_amplitude = f.get("n_amplitude", g.n_amplitude);
  g.lengthscale_min = f.get("lengthscale_min", g.lengthscale_min);
  g.lengthscale_max = f.get("lengthscale_max", g.lengthscale_max);
  g.amplitude_min = f.get("amplitude_min", g.amplitude_min);
  g.amplitude_max = f.get("amplitude_max", g.amplitude_max);
  at_least(g.n_lengthscale, 2, f.at("n_lengthscale"));
  at_least(g.n_amplitude, 2, f.at("n_amplitude"));
  positive(g.lengthscale_min, f.at("lengthscale_min"));
  positive(g.amplitude_min, f.at("amplitude_min"));
  if (!(g.lengthscale_max > g.lengthscale_min)) fail(f.at("lengthscale_max"), "must exceed lengthscale_min");
  if (!(g.amplitude_max > g.amplitude_min)) fail(f.at("amplitude_max"), "must exceed amplitude_min");
  f.finish();
  return g;
}

json dataset_json(const DatasetSpec& d) {
  json j{{"name", d.name}, {"extra_dims", d.extra_dims}};
  if (d.name == "parity") {
    j["k"] = d.k;
    j["n_train"] = d.n_train;
    j["n_val"] = d.n_val;
    j["sampling"] = d.sampling == ParitySampling::automatic  ? "automatic"
                    : d.sampling == ParitySampling::distinct ? "distinct"
                                                             : "with_replacement";
  } else if (d.name == "modular") {
    json ops = json::array();
    for (auto op : d.ops) ops.push_back(to_string(op));
    j["ops"] = ops;
    j["p"] = d.p;
    j["split"] = d.split == ModularSplit::partition ? "partition" : "sampled";
    if (d.split == ModularSplit::partition) {
      j["train_fraction"] = d.train_fraction;
    } else {
      j["n_train"] = d.n_train;
      j["n_val"] = d.n_val;
    }
  } else if (d.name == "sine") {
    j["n_train"] = d.n_train;
    j["n_val"] = d.n_val;
    j["amplitude"] = d.sine.amplitude;
    j["frequency"] = d.sine.frequency;
    j["phase"] = d.sine.phase;
    j["noise"] = d.sine.noise;
    j["x_min"] = d.sine.x_min;
    j["x_max"] = d.sine.x_max;
    j["x_jitter"] = d.sine.x_jitter;
  } else {
    j["n_train"] = d.n_train;
    j["n_val"] = d.n_val;
    if (d.name == "zero_one_slope") j["slope_features"] = d.slope_features;
  }
  return j;
}

json model_json(const ModelSpec& m) {
  json j{{"kind", m.kind}};
  if (m.kind == "linear") {
    j.update({{"mu0", m.mu0}, {"sigma0", m.sigma0}, {"eps0", m.eps0}, {"init", m.init}});
  } else if (m.kind == "mlp") {
    j.update({{"hidden", m.hidden}, {"init_scale", m.init_scale}});
  } else if (m.kind == "bnn") {
    j.update({{"hidden", m.hidden},
              {"mc_samples", m.mc_samples},
              {"eval_mc_samples", m.eval_mc_samples},
              {"init_log_std", m.init_log_std},
              {"init_sigma", m.init_sigma},
              {"sigma_list", m.sigma_list},
              {"mc_predictive", m.mc_predictive},
              {"kl_weight", m.kl_weight}});
  } else if (m.kind == "gpr") {
    j.update({{"lengthscale", m.lengthscale}, {"amplitude", m.amplitude}, {"noise", m.noise}, {"learn_noise", m.learn_noise}});
  } else {
    j.update({{"lengthscale", m.lengthscale}, {"amplitude", m.amplitude}, {"beta", m.beta}, {"quad_order", m.quad_order}});
  }
  return j;
}

void canonicalize(ExperimentConfig& c) {
  json j{{"experiment", to_string(c.experiment)},
         {"master_seed", c.master_seed},
         {"seeds", c.seeds},
         {"output", c.output},
         {"gamma", c.gamma}};
  if (c.dataset) j["dataset"] = dataset_json(*c.dataset);
  if (c.model) {
    j["model"] = model_json(*c.model);
    j["optimizer"] = {{"lr", c.lr()},
                      {"epochs", c.epochs()},
                      {"weight_decay", c.optimizer.weight_decay},
                      {"batch_size", c.optimizer.batch_size},
                      {"beta1", c.optimizer.beta1},
                      {"beta2", c.optimizer.beta2},
                      {"eps", c.optimizer.eps}};
  }
  if (c.experiment == ExperimentKind::sweep) j["lengths"] = c.lengths;
  if (c.experiment == ExperimentKind::landscape) {
    j["grid"] = {{"n_lengthscale", c.grid.n_lengthscale},     {"n_amplitude", c.grid.n_amplitude},
                 {"lengthscale_min", c.grid.lengthscale_min}, {"lengthscale_max", c.grid.lengthscale_max},
                 {"amplitude_min", c.grid.amplitude_min},     {"amplitude_max", c.grid.amplitude_max}};
    json inits = json::array();
    for (const auto& i : c.inits)
      inits.push_back({{"label", i.label}, {"lengthscale", i.lengthscale}, {"amplitude", i.amplitude}});
    j["inits"] = inits;
  }
  if (!c.input.empty()) j["input"] = c.input;
  c.canonical = j.dump(2) + "\n";
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigInvalid(std::string("<root>: malformed JSON: ") + e.what());
  }
  Fields f(root, "");
  ExperimentConfig c;
  const auto kind = f.need<std::string>("experiment");
  const auto parsed = experiment_from_string(kind);
  if (!parsed) fail("experiment", "unknown experiment kind '" + kind + "'");
  c.experiment = *parsed;
  c.master_seed = f.get<std::uint64_t>("master_seed", 0);
  c.seeds = f.get("seeds", c.seeds);
  at_least(c.seeds, 1, "seeds");
  c.output = f.get("output", c.output);
  c.gamma = f.get("gamma", c.gamma);
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) fail("gamma", "must be in (0, 1]");

  const bool needs_data = c.experiment == ExperimentKind::train || c.experiment == ExperimentKind::sweep ||
                          c.experiment == ExperimentKind::landscape || c.experiment == ExperimentKind::bnn_sweep ||
                          c.experiment == ExperimentKind::gen;
  const bool needs_model = needs_data && c.experiment != ExperimentKind::gen;
  if (needs_data) f.require("dataset");
  if (f.has("dataset")) c.dataset = parse_dataset(f.raw("dataset"));
  if (needs_model) f.require("model");
  if (f.has("model")) c.model = parse_model(f.raw("model"));
  if (f.has("optimizer")) c.optimizer = parse_optimizer(f.raw("optimizer"));

  if (c.experiment == ExperimentKind::sweep) {
    if (c.dataset->name != "modular") fail("dataset.name", "sweep requires the modular dataset");
    if (c.model->kind != "mlp") fail("model.kind", "sweep requires the mlp model");
    c.lengths = f.get("lengths", c.lengths);
    if (c.lengths.empty()) fail("lengths", "expected a non-empty array");
  }
  if (c.experiment == ExperimentKind::landscape) {
    if (c.model->kind != "gpr" && c.model->kind != "gpc") fail("model.kind", "landscape requires gpr or gpc");
    if (f.has("grid")) c.grid = parse_grid(f.raw("grid"));
    if (f.has("inits")) {
      const json& arr = f.raw("inits");
      if (!arr.is_array()) fail("inits", "expected an array");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        Fields g(arr[i], "inits[" + std::to_string(i) + "]");
        const auto label = g.need<std::string>("label");
        const double ls = g.need<double>("lengthscale");
        const double amp = g.need<double>("amplitude");
        positive(ls, g.at("lengthscale"));
        positive(amp, g.at("amplitude"));
        g.finish();
        c.inits.push_back({label, ls, amp});
      }
    }
  }
  if (c.experiment == ExperimentKind::bnn_sweep && c.model->kind != "bnn")
    fail("model.kind", "bnn_sweep requires the bnn model");
  if (c.experiment == ExperimentKind::train && c.model->kind == "linear" && c.dataset->name != "zero_one_slope" &&
      c.dataset->name != "zero_one")
    fail("dataset.name", "the linear model trains on zero_one or zero_one_slope");
  if (c.experiment == ExperimentKind::train && c.model->kind == "gpr" && c.dataset->name != "sine")
    fail("dataset.name", "the gpr model trains on the sine dataset");
  if (c.model && c.model->kind != "gpr" && c.dataset && c.dataset->name == "sine")
    fail("model.kind", "the sine dataset is a regression task; use gpr");
  if (c.experiment == ExperimentKind::stats || c.experiment == ExperimentKind::report)
    c.input = f.get<std::string>("input", "");
  f.finish();
  canonicalize(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError& e) {
    throw ConfigInvalid(std::string("<file>: ") + e.what());
  }
  return parse_config(text);
}

SplitDataset make_dataset(const DatasetSpec& spec, const StreamKey& key) {
  SplitDataset d;
  if (spec.name == "parity") {
    d = gen_parity(spec.k, spec.n_train, spec.n_val, key.child("data"), spec.sampling);
  } else if (spec.name == "modular") {
    d = spec.split == ModularSplit::partition
            ? gen_modular(spec.ops.front(), spec.p, spec.train_fraction, key.child("data"))
            : gen_modular_sampled(spec.ops.front(), spec.p, spec.n_train, spec.n_val, key.child("data"));
  } else if (spec.name == "zero_one") {
    d = gen_zero_one(spec.n_train, spec.n_val, key.child("data"));
  } else if (spec.name == "zero_one_slope") {
    d = gen_zero_one_slope(spec.n_train, spec.n_val, key.child("data"));
    if (spec.slope_features) {
      d.train_x = expand_slope_features(d.train_x);
      d.val_x = expand_slope_features(d.val_x);
      d.meta.input_dim = d.train_x.cols();
    }
  } else if (spec.name == "sine") {
    d = gen_sine(spec.n_train, spec.n_val, spec.sine, key.child("data"));
  } else {
    throw ConfigInvalid("dataset.name: unknown dataset '" + spec.name + "'");
  }
  if (spec.extra_dims > 0) d = conceal(std::move(d), spec.extra_dims, key.child("conceal"));
  return d;
}

namespace {

AdamConfig adam_of(const ExperimentConfig& c) {
  return {c.lr(), c.optimizer.beta1, c.optimizer.beta2, c.optimizer.eps};
}

const ModelSpec& model_of(const ExperimentConfig& c) {
  if (!c.model) throw ConfigInvalid("model: missing required field");
  return *c.model;
}

}  // namespace

MlpConfig make_mlp_config(const ExperimentConfig& c) {
  const ModelSpec& m = model_of(c);
  MlpConfig out;
  out.hidden = m.hidden;
  out.init_scale = m.init_scale;
  out.lr = c.lr();
  out.weight_decay = c.optimizer.weight_decay;
  out.epochs = c.epochs();
  out.batch_size = c.optimizer.batch_size;
  return out;
}

SweepConfig make_sweep_config(const ExperimentConfig& c) {
  if (!c.dataset) throw ConfigInvalid("dataset: missing required field");
  SweepConfig s;
  s.datasets = c.dataset->ops;
  s.lengths = c.lengths;
  s.seeds = c.seeds;
  s.prime = c.dataset->p;
  s.split = c.dataset->split;
  s.train_fraction = c.dataset->train_fraction;
  s.n_train = c.dataset->n_train;
  s.n_val = c.dataset->n_val;
  s.mlp = make_mlp_config(c);
  s.gamma = c.gamma;
  s.master_seed = c.master_seed;
  return s;
}

BnnConfig make_bnn_config(const ExperimentConfig& c) {
  const ModelSpec& m = model_of(c);
  BnnConfig out;
  out.hidden = m.hidden;
  out.adam = adam_of(c);
  out.epochs = c.epochs();
  out.mc_samples = m.mc_samples;
  out.eval_mc_samples = m.eval_mc_samples;
  out.init_log_std = m.init_log_std;
  out.gamma = c.gamma;
  out.mc_predictive = m.mc_predictive;
  out.kl_weight = m.kl_weight;
  return out;
}

GprFitConfig make_gpr_config(const ExperimentConfig& c) {
  const ModelSpec& m = model_of(c);
  GprFitConfig out;
  out.adam = adam_of(c);
  out.epochs = c.epochs();
  out.learn_noise = m.learn_noise;
  return out;
}

GpcConfig make_gpc_config(const ExperimentConfig& c) {
  const ModelSpec& m = model_of(c);
  GpcConfig out;
  out.beta = m.beta;
  out.quad_order = m.quad_order;
  out.adam = adam_of(c);
  out.epochs = c.epochs();
  out.init_lengthscale = m.lengthscale;
  out.init_amplitude = m.amplitude;
  return out;
}

}  // namespace grok
