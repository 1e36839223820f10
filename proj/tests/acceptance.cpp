// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fd.hpp"
#include "json.hpp"

#include "groklab/bnn_model.hpp"
#include "groklab/config.hpp"
#include "groklab/experiments.hpp"
#include "groklab/gp_classification.hpp"
#include "groklab/gp_regression.hpp"
#include "groklab/io.hpp"
#include "groklab/linear_model.hpp"
#include "groklab/mlp_model.hpp"
#include "groklab/stats.hpp"

using namespace grok;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

const fs::path kSource = GROKLAB_SOURCE_DIR;
const fs::path kWork = fs::temp_directory_path() / "groklab_acceptance";

fs::path fresh(const std::string& name) {
  const fs::path p = kWork / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

Matrix random_matrix(std::size_t r, std::size_t c, Stream& s) {
  Matrix m(r, c);
  for (double& v : m.data()) v = s.standard_normal();
  return m;
}

Vector random_vector(std::size_t n, Stream& s) {
  Vector v(n);
  for (double& x : v) x = s.standard_normal();
  return v;
}

// Worst FD relative error over every coordinate of `x`.
double worst_fd(const std::function<double(const std::vector<double>&)>& f, const std::vector<double>& x,
                const std::vector<double>& grad) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    worst = std::max(worst, groktest::rel_err(grad[i], groktest::central_diff(f, x, i)));
  return worst;
}

std::vector<double> flat(const MlpParams& p) {
  std::vector<double> v;
  p.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  return v;
}

MlpParams unflat(MlpParams p, const std::vector<double>& v, std::size_t offset = 0) {
  p.for_each([&](std::vector<double>& t) {
    for (double& x : t) x = v[offset++];
  });
  return p;
}

// ---------------------------------------------------------------------------

Outcome gradients() {
  constexpr int kInstances = 10;
  constexpr double kTol = 1e-5;
  Stream s(StreamKey(101, {"acceptance", "gradients"}));
  double lin = 0, mlp = 0, bnn = 0, gpr = 0, gpc = 0;

  for (int t = 0; t < kInstances; ++t) {
    const Matrix x = random_matrix(6, 4, s);
    const Vector y = random_vector(6, s);
    GaussianPriorSpec prior = GaussianPriorSpec::isotropic(4, 0.1, 0.5, 0.1 + s.uniform_unit());
    const Vector w = random_vector(4, s);
    lin = std::max(lin, worst_fd([&](const std::vector<double>& v) { return lr_loss(v, prior, x, y).total; }, w,
                                 lr_grad(w, prior, x, y)));
  }
  for (int t = 0; t < kInstances; ++t) {
    MlpParams p = init_mlp(4, 5, 3, 1.0, s);
    for (double& b : p.b1) b = 0.1 * s.standard_normal();
    const Matrix x = random_matrix(5, 4, s);
    std::vector<int> labels;
    for (int i = 0; i < 5; ++i) labels.push_back(static_cast<int>(s.uniform_index(3)));
    const auto f = [&](const std::vector<double>& v) { return mlp_loss_grad(unflat(p, v), x, labels, 0.01).loss; };
    mlp = std::max(mlp, worst_fd(f, flat(p), flat(mlp_loss_grad(p, x, labels, 0.01).grads)));
  }
  for (int t = 0; t < kInstances; ++t) {
    BnnVariationalParams phi{init_mlp(3, 4, 2, 1.0, s), MlpParams::zeros(3, 4, 2)};
    phi.log_std.for_each([&](std::vector<double>& v) {
      for (double& z : v) z = -1.0 + 0.3 * s.standard_normal();
    });
    MlpParams eps = MlpParams::zeros(3, 4, 2);
    eps.for_each([&](std::vector<double>& v) {
      for (double& z : v) z = s.standard_normal();
    });
    const Matrix x = random_matrix(5, 3, s);
    const std::vector<int> labels{0, 1, 1, 0, 1};
    std::vector<double> theta = flat(phi.mean), lg = flat(phi.log_std);
    const std::size_t half = theta.size();
    theta.insert(theta.end(), lg.begin(), lg.end());
    const BnnGrad g = bnn_grad_fixed(phi, x, labels, eps);
    std::vector<double> grad = flat(g.mean), gl = flat(g.log_std);
    grad.insert(grad.end(), gl.begin(), gl.end());
    const auto f = [&](const std::vector<double>& v) {
      return bnn_objective_fixed({unflat(phi.mean, v), unflat(phi.log_std, v, half)}, x, labels, eps).total;
    };
    bnn = std::max(bnn, worst_fd(f, theta, grad));
  }
  for (int t = 0; t < kInstances; ++t) {
    const std::size_t d = 1 + static_cast<std::size_t>(t % 3);
    const Matrix x = random_matrix(7, d, s);
    const Vector y = random_vector(7, s);
    KernelHyperparams h = KernelHyperparams::isotropic(d, 1.0, 1.0, 0.3);
    for (double& l : h.log_lengthscales) l = 0.3 * s.standard_normal();
    const auto f = [&](const std::vector<double>& p) { return lml(x, y, KernelHyperparams::unpack(p)).total; };
    gpr = std::max(gpr, worst_fd(f, h.pack(), lml_grad(x, y, h)));
  }
  for (int t = 0; t < kInstances; ++t) {
    const std::size_t n = 5;
    GpcModel m;
    m.train_x = random_matrix(n, 2, s);
    m.hyp = KernelHyperparams::isotropic(2, 0.8 + 0.4 * s.uniform_unit(), 0.8 + 0.4 * s.uniform_unit());
    m.q.mu = random_vector(n, s);
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) l(i, j) = i == j ? 0.5 + 0.3 * s.uniform_unit() : 0.2 * s.standard_normal();
    m.q.chol_cov = LowerTriangular(l);
    std::vector<int> y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(static_cast<int>(s.uniform_index(2)));
    const ElboGrad g = elbo_grad(m, y, 1.0, 20);
    // Pack mu, lower triangle of L, ln alpha, ln l.
    std::vector<double> theta = m.q.mu, grad = g.mu;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        theta.push_back(l(i, j));
        grad.push_back(g.chol(i, j));
      }
    theta.push_back(m.hyp.log_amplitude);
    theta.insert(theta.end(), m.hyp.log_lengthscales.begin(), m.hyp.log_lengthscales.end());
    grad.insert(grad.end(), g.hyp.begin(), g.hyp.end());
    const auto f = [&](const std::vector<double>& v) {
      GpcModel mm = m;
      std::size_t k = 0;
      for (double& mu : mm.q.mu) mu = v[k++];
      Matrix ll(n, n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) ll(i, j) = v[k++];
      mm.q.chol_cov = LowerTriangular(ll);
      mm.hyp.log_amplitude = v[k++];
      for (double& ls : mm.hyp.log_lengthscales) ls = v[k++];
      return elbo(mm, y, 1.0, 20).elbo;
    };
    gpc = std::max(gpc, worst_fd(f, theta, grad));
  }
  const double worst = std::max({lin, mlp, bnn, gpr, gpc});
  return {worst <= kTol, "worst rel err linear " + fmt(lin) + ", mlp " + fmt(mlp) + ", bnn " + fmt(bnn) + ", gpr " +
                             fmt(gpr) + ", gpc " + fmt(gpc) + " (tol 1e-5, 10 instances each)"};
}

Outcome identities() {
  Stream s(StreamKey(102, {"acceptance", "identities"}));
  int bad = 0, checked = 0;
  for (int t = 0; t < 20; ++t) {
    const Matrix x = random_matrix(8, 2, s);
    const Vector y = random_vector(8, s);
    KernelHyperparams h = KernelHyperparams::isotropic(2, 0.5 + s.uniform_unit(), 0.5 + s.uniform_unit(), 0.2);
    const LmlBreakdown b = lml(x, y, h);
    bad += (b.data_fit + b.complexity + b.normalization) + b.total != 0.0;
    ++checked;

    GpcModel m;
    m.train_x = x;
    m.hyp = h;
    m.q.mu = random_vector(8, s);
    m.q.chol_cov = cholesky(gpc_prior_cov(x, h));
    std::vector<int> labels;
    for (int i = 0; i < 8; ++i) labels.push_back(y[i] > 0 ? 1 : 0);
    for (double beta : {0.5, 1.0}) {
      const ElboBreakdown e = elbo(m, labels, beta, 20);
      bad += e.elbo + (e.data_fit + beta * e.kl) != 0.0;
      ++checked;
    }
  }
  const SplitDataset slope = slope_task(2, 50, StreamKey(102, {"slope"}));
  const LinearFit lf = fit_lr(slope, GaussianPriorSpec::isotropic(4, 0.0, 0.5, 0.1), {5e-4, 0.9, 0.9, 0.9}, 1e-2, 200);
  for (const TraceRow& r : lf.trace.rows) {
    bad += r.train_loss != r.data_fit + r.complexity;
    ++checked;
  }
  const SplitDataset par = conceal(gen_parity(3, 32, 32, StreamKey(102, {"parity"})), 4, StreamKey(102, {"conceal"}));
  BnnConfig bc;
  bc.hidden = 16;
  bc.epochs = 30;
  bc.eval_mc_samples = 2;
  const BnnFit bf = fit_bnn(par, 0.1, bc, StreamKey(102, {"bnn"}));
  for (const TraceRow& r : bf.trace.rows) {
    bad += r.train_loss != r.data_fit + r.complexity;
    ++checked;
  }
  return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) + " identities hold bitwise"};
}

Outcome laplace_consistency() {
  Stream s(StreamKey(103, {"acceptance", "laplace"}));
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 5 + static_cast<std::size_t>(t);
    const Matrix x = random_matrix(n, 2, s);
    const Vector y = random_vector(n, s);
    const auto hyp = KernelHyperparams::isotropic(2, 0.5 + s.uniform_unit(), 0.5 + s.uniform_unit());
    LaplaceConfig cfg;
    cfg.likelihood = LaplaceLikelihood::gaussian;
    cfg.noise = 0.2 + 0.5 * s.uniform_unit();
    const double half_log_b = laplace(x, y, hyp, cfg).complexity_term;
    Matrix k = gpc_prior_cov(x, hyp);
    for (std::size_t i = 0; i < n; ++i) k(i, i) += cfg.noise * cfg.noise;
    const double gpr = 0.5 * logdet(cholesky(k)) - 0.5 * static_cast<double>(n) * std::log(cfg.noise * cfg.noise);
    worst = std::max(worst, std::abs(half_log_b - gpr));
  }
  return {worst <= 1e-9, "max |1/2 ln|B| - GPR complexity| = " + fmt(worst) + " over 10 instances (tol 1e-9)"};
}

Outcome dataset_oracles() {
  int bad = 0, checked = 0;
  for (int p : {3, 5, 7})
    for (ModularOp op : all_modular_ops()) {
      const SplitDataset d = gen_modular(op, p, 0.5, StreamKey(104, {"acceptance", to_string(op), p}));
      for (int split = 0; split < 2; ++split) {
        const Matrix& x = split ? d.val_x : d.train_x;
        const auto& labels = split ? d.val_labels : d.train_labels;
        for (std::size_t i = 0; i < x.rows(); ++i) {
          int a = 0, b = 0;
          for (int j = 0; j < p; ++j) {
            if (x(i, j) == 1.0) a = j;
            if (x(i, p + j) == 1.0) b = j;
          }
          int expect = -1;
          switch (op) {
            case ModularOp::add: expect = (a + b) % p; break;
            case ModularOp::sub: expect = ((a - b) % p + p) % p; break;
            case ModularOp::div:
              for (int inv = 1; inv < p; ++inv)
                if ((b * inv) % p == 1) expect = (a * inv) % p;
              break;
            case ModularOp::poly: expect = (a * a + a * b + b * b) % p; break;
            case ModularOp::ext_poly: expect = (a * a + a * b + b * b + a) % p; break;
            case ModularOp::ext_mult: expect = (a * b * a) % p; break;
          }
          bad += labels[i] != expect;
          ++checked;
        }
      }
    }
  for (int k = 1; k <= 10; ++k)
    for (unsigned m = 0; m < (1u << k); ++m) {
      std::vector<double> bits(k);
      int prod = 1;
      for (int i = 0; i < k; ++i) {
        bits[i] = (m >> i) & 1u;
        prod *= bits[i] == 1.0 ? 1 : -1;
      }
      bad += parity_target(bits) != prod;
      ++checked;
    }
  return {bad == 0, std::to_string(checked - bad) + "/" + std::to_string(checked) + " targets match brute force"};
}

ExperimentConfig committed(const std::string& name) { return load_config(kSource / "configs" / name); }

Outcome linear_grokking() {
  const ExperimentConfig cfg = committed("linear_slope.json");
  const fs::path out = fresh("linear");
  run_train(cfg, {out, 0});
  const CsvTable t = read_csv(out / "summary.csv");
  std::string hits;
  for (const auto& row : t.rows) {
    if (row[t.column("failed")] == "1" || row[t.column("censored")] == "1") continue;
    const long long e1 = std::stoll(row[t.column("e_train")]), e2 = std::stoll(row[t.column("e_val")]);
    if (e1 >= 1 && e2 - e1 >= 10 * e1) hits += " seed " + row[t.column("seed")] + " (E1 " + std::to_string(e1) + ", E2 " + std::to_string(e2) + ")";
  }
  return {!hits.empty(), hits.empty() ? "no seed with E2 - E1 >= 10 E1 at accuracy 1.0" : "E2 - E1 >= 10 E1 for" + hits};
}

Outcome gpc_grokking() {
  const fs::path zo = fresh("gpc_zero_one"), par = fresh("gpc_parity");
  run_train(committed("gpc_zero_one.json"), {zo, 0});
  run_train(committed("gpc_parity.json"), {par, 0});
  const CsvTable a = read_csv(zo / "summary.csv"), b = read_csv(par / "summary.csv");
  double mean = 0.0;
  for (const auto& row : a.rows) mean += parse_double(row[a.column("final_val_acc")]);
  mean /= static_cast<double>(a.rows.size());
  int positive = 0;
  for (const auto& row : b.rows)
    if (row[b.column("censored")] == "0" && std::stoll(row[b.column("delta_signed")]) > 0) ++positive;
  const bool ok = a.rows.size() == 5 && mean >= 0.9 && b.rows.size() == 5 && positive >= 3;
  return {ok, "zero-one mean final val acc " + fmt(mean) + " (need >= 0.9); concealed parity seeds with signed gap > 0: " +
                  std::to_string(positive) + "/5 (need >= 3)"};
}

Outcome concealment_trend() {
  const fs::path out = fresh("sweep");
  run_sweep(committed("concealment_sweep.json"), {out, 0});
  const SweepStats st = sweep_stats(read_csv(out / "sweep.csv"));
  if (!st.combined.correlation) return {false, "no combined correlation: " + st.combined.error};
  const CorrelationResult& c = *st.combined.correlation;
  return {c.r >= 0.8 && c.p < 0.05,
          "combined r = " + fmt(c.r) + ", p = " + fmt(c.p) + " over " + std::to_string(c.n) + " cells (need r >= 0.8, p < 0.05)"};
}

Outcome landscape() {
  const fs::path out = fresh("landscape");
  run_landscape(committed("gpr_landscape.json"), {out, 0});
  const CsvTable t = read_csv(out / "landscape_summary.csv");
  std::string detail;
  bool ok = true;
  int seen = 0;
  for (const auto& row : t.rows) {
    const std::string& label = row[t.column("label")];
    const bool delayed = row[t.column("delayed")] == "1";
    detail += label + (delayed ? " delayed" : " not delayed") + " (train settles " + row[t.column("e_train")] +
              ", val halves " + (row[t.column("e_val")].empty() ? "never" : row[t.column("e_val")]) + "); ";
    if (label == "B") ok = ok && delayed, ++seen;
    if (label == "A" || label == "C") ok = ok && !delayed, ++seen;
  }
  return {ok && seen == 3, detail};
}

Outcome bnn_trend() {
  const fs::path out = fresh("bnn");
  run_bnn_sweep(committed("bnn_sweep.json"), {out, 0});
  const auto j = nlohmann::json::parse(read_text(out / "bnn_stats.json"));
  const auto& c = j.at("lehc_vs_gap");
  const std::string runs = std::to_string(j.at("n_uncensored").get<std::size_t>()) + "/" +
                           std::to_string(j.at("n_runs").get<std::size_t>()) + " runs uncensored";
  if (!c.contains("r")) return {false, runs + "; correlation undefined: " + c.at("error").get<std::string>()};
  const double r = c.at("r").get<double>();
  return {r > 0.5, runs + "; r(LEHC epochs, signed gap) = " + fmt(r) + " (need > 0.5)"};
}

Outcome statistics() {
  const CorrelationResult c = pearson({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5});
  // Independent oracle: Simpson integration of the t density with 3 dof.
  const double t = c.r * std::sqrt(3.0 / (1.0 - c.r * c.r));
  const auto pdf = [](double x) { return 2.0 / (3.14159265358979323846 * std::sqrt(3.0)) * std::pow(1.0 + x * x / 3.0, -2.0); };
  const int n = 100000;
  const double h = t / n;
  double acc = pdf(0.0) + pdf(t);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * pdf(i * h);
  const double p_oracle = 1.0 - 2.0 * acc * h / 3.0;

  std::vector<std::pair<double, double>> pts;
  for (double l : {0.0, 1.0, 2.0}) pts.emplace_back(l, std::exp(2.0 * l + 1.0));
  const RegressionFit f = log_space_fit(pts);
  const bool ok = std::abs(c.r - 0.8) <= 1e-4 && std::abs(c.p - p_oracle) <= 1e-4 && std::abs(f.a - 2.0) <= 1e-12 &&
                  std::abs(f.b - 1.0) <= 1e-12;
  return {ok, "r = " + fmt(c.r) + ", p = " + fmt(c.p) + " (oracle " + fmt(p_oracle) + "); fit a - 2 = " + fmt(f.a - 2.0) +
                  ", b - 1 = " + fmt(f.b - 1.0)};
}

Outcome determinism() {
  const fs::path dir = fresh("determinism");
  const std::string cli = GROKLAB_CLI_PATH;
  const std::string cfg = (kSource / "configs" / "linear_slope.json").string();
  std::size_t compared = 0;
  for (int jobs : {1, 2}) {
    const std::string cmd = cli + " train --config " + cfg + " --jobs " + std::to_string(jobs) + " --out " +
                            (dir / ("jobs" + std::to_string(jobs))).string() + " > /dev/null 2>&1";
    std::system(cmd.c_str());
  }
  const fs::path a = dir / "jobs1", b = dir / "jobs2";
  if (!fs::exists(a / "summary.csv")) return {false, "train run produced no output"};
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    const fs::path other = b / fs::relative(e.path(), a);
    if (!fs::exists(other) || read_text(e.path()) != read_text(other))
      return {false, "differs: " + fs::relative(e.path(), a).string()};
    ++compared;
  }
  return {compared > 0, std::to_string(compared) + " CSV files byte-identical between --jobs 1 and --jobs 2"};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {1, "gradient oracle suite", 60, gradients},
      {2, "decomposition identities", 1, identities},
      {3, "Laplace consistency", 10, laplace_consistency},
      {4, "dataset oracles", 10, dataset_oracles},
      {5, "linear regression grokking", 60, linear_grokking},
      {6, "GP classification grokking", 20 * 60, gpc_grokking},
      {7, "concealment trend", 60 * 60, concealment_trend},
      {8, "landscape reproduction", 5 * 60, landscape},
      {9, "BNN trend", 30 * 60, bnn_trend},
      {10, "statistics unit targets", 1, statistics},
      {11, "determinism across --jobs", 120, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %s: %s  %s [%.1fs, limit %.0fs%s]\n", c.id, c.name, pass ? "PASS" : "FAIL", o.detail.c_str(),
                secs, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  fs::remove_all(kWork);
  return failed == 0 ? 0 : 1;
}
