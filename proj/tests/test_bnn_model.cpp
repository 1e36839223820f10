#include <doctest.h>

#include <cmath>

#include "fd.hpp"
#include "groklab/bnn_model.hpp"

using namespace grok;

namespace {

BnnVariationalParams prior_like(std::size_t in, std::size_t hidden, std::size_t classes) {
  BnnVariationalParams phi{MlpParams::zeros(in, hidden, classes), MlpParams::zeros(in, hidden, classes)};
  return phi;
}

BnnVariationalParams random_phi(std::size_t in, std::size_t hidden, std::size_t classes, Stream& s) {
  BnnVariationalParams phi = prior_like(in, hidden, classes);
  phi.mean.for_each([&](std::vector<double>& t) {
    for (double& v : t) v = 0.5 * s.standard_normal();
  });
  phi.log_std.for_each([&](std::vector<double>& t) {
    for (double& v : t) v = -1.0 + 0.3 * s.standard_normal();
  });
  return phi;
}

MlpParams random_eps(const MlpParams& shape, Stream& s) {
  MlpParams e = shape;
  e.for_each([&](std::vector<double>& t) {
    for (double& v : t) v = s.standard_normal();
  });
  return e;
}

std::vector<double> flatten(const BnnVariationalParams& phi) {
  std::vector<double> v;
  phi.mean.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  phi.log_std.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  return v;
}

std::vector<double> flatten(const BnnGrad& g) {
  std::vector<double> v;
  g.mean.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  g.log_std.for_each([&](const std::vector<double>& t) { v.insert(v.end(), t.begin(), t.end()); });
  return v;
}

BnnVariationalParams unflatten(BnnVariationalParams phi, const std::vector<double>& v) {
  std::size_t k = 0;
  const auto fill = [&](std::vector<double>& t) {
    for (double& x : t) x = v[k++];
  };
  phi.mean.for_each(fill);
  phi.log_std.for_each(fill);
  return phi;
}

}  // namespace

TEST_CASE("bnn KL examples") {
  CHECK(bnn_kl(prior_like(2, 3, 2)) == 0.0);

  BnnVariationalParams one = prior_like(1, 1, 1);
  one.mean.w1(0, 0) = 1.0;
  CHECK(bnn_kl(one) == doctest::Approx(0.5).epsilon(1e-15));

  // dKL/dmu = mu at sigma = 1; zero at the prior.
  BnnVariationalParams two = prior_like(1, 1, 1);
  two.mean.w1(0, 0) = 2.0;
  Stream s(StreamKey(1, {"kl"}));
  const MlpParams eps = random_eps(two.mean, s);
  const Matrix x(1, 1, 0.0);
  const BnnGrad with = bnn_grad_fixed(two, x, {0}, eps);
  two.mean.w1(0, 0) = 0.0;
  const BnnGrad without = bnn_grad_fixed(two, x, {0}, eps);
  // Zero input: the data term cannot reach w1, so the gradient is the KL part only.
  CHECK(with.mean.w1(0, 0) == doctest::Approx(2.0));
  CHECK(without.mean.w1(0, 0) == 0.0);
  CHECK(without.log_std.w1(0, 0) == 0.0);

  Stream r(StreamKey(2, {"kl_pos"}));
  for (int t = 0; t < 10; ++t) CHECK(bnn_kl(random_phi(3, 4, 2, r)) > 0.0);
}

TEST_CASE("fixed-noise gradient matches central differences") {
  Stream s(StreamKey(3, {"bnn_fd"}));
  for (int t = 0; t < 10; ++t) {
    const BnnVariationalParams phi = random_phi(4, 5, 3, s);
    const MlpParams eps = random_eps(phi.mean, s);
    Matrix x(6, 4);
    for (double& v : x.data()) v = s.standard_normal();
    std::vector<int> labels;
    for (int i = 0; i < 6; ++i) labels.push_back(static_cast<int>(s.uniform_index(3)));

    const std::vector<double> theta = flatten(phi);
    const std::vector<double> grad = flatten(bnn_grad_fixed(phi, x, labels, eps));
    const auto f = [&](const std::vector<double>& v) { return bnn_objective_fixed(unflatten(phi, v), x, labels, eps).total; };
    for (int k = 0; k < 10; ++k) {
      const std::size_t i = s.uniform_index(theta.size());
      CHECK(groktest::rel_err(grad[i], groktest::central_diff(f, theta, i)) <= 1e-5);
    }
  }
}

TEST_CASE("objective identity and Monte-Carlo convergence") {
  Stream s(StreamKey(4, {"mc"}));
  const BnnVariationalParams phi = random_phi(3, 4, 2, s);
  Matrix x(5, 3);
  for (double& v : x.data()) v = s.standard_normal();
  const std::vector<int> labels{0, 1, 1, 0, 1};

  Stream a(StreamKey(4, {"mc", "a"})), b(StreamKey(4, {"mc", "b"}));
  const BnnObjective lo = bnn_objective(phi, x, labels, 10000, a);
  const BnnObjective hi = bnn_objective(phi, x, labels, 100000, b);
  CHECK(lo.total == lo.expected_ce + lo.kl);
  CHECK(lo.kl == hi.kl);
  const double se = std::hypot(lo.expected_ce_stderr, hi.expected_ce_stderr);
  CHECK(std::abs(lo.expected_ce - hi.expected_ce) <= 3.0 * se);
}

TEST_CASE("bnn training trace") {
  const SplitDataset d = conceal(gen_parity(3, 32, 32, StreamKey(5, {"data"})), 5, StreamKey(5, {"conceal"}));
  BnnConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 20;
  cfg.eval_mc_samples = 2;
  const BnnFit a = fit_bnn(d, 0.1, cfg, StreamKey(5, {"model"}));
  const BnnFit b = fit_bnn(d, 0.1, cfg, StreamKey(5, {"model"}));
  CHECK(a.trace.rows == b.trace.rows);
  REQUIRE(a.trace.size() == 21);
  for (const TraceRow& r : a.trace.rows) {
    CHECK(r.train_loss == r.data_fit + r.complexity);
    CHECK(r.complexity >= 0.0);
  }
  CHECK(a.trace.rows.back().complexity == doctest::Approx(bnn_kl(a.phi)).epsilon(1e-12));
}

TEST_CASE("lehc epoch count") {
  TrainingTrace t;
  const double acc[] = {0.5, 0.96, 0.97, 0.99, 0.99, 0.99};
  const double comp[] = {10.0, 20.0, 15.0, 12.5, 11.0, 10.0};
  for (std::size_t e = 0; e < 6; ++e) t.rows.push_back(TraceRow{e, 0.0, acc[e], 0.0, 0.0, comp[e]});
  // Final complexity 10: rows with comp > 12 and acc >= 0.95 are epochs 1, 2, 3.
  CHECK(lehc_epochs(t) == 3);
  CHECK(lehc_epochs(t, 0.98) == 1);
}

TEST_CASE("init sweep normalises gaps") {
  const SplitDataset d = gen_parity(3, 32, 32, StreamKey(6, {"data"}));
  BnnConfig cfg;
  cfg.hidden = 8;
  cfg.epochs = 10;
  cfg.eval_mc_samples = 1;
  const auto runs = bnn_init_sweep(d, {0.1}, 1, cfg, StreamKey(6, {"sweep"}), 1);
  REQUIRE(runs.size() == 1);
  if (!runs[0].gap.censored) CHECK(runs[0].normalized_gap == 0.0);
  else CHECK(std::isnan(runs[0].normalized_gap));

  const auto one = bnn_init_sweep(d, {0.1, 0.2}, 2, cfg, StreamKey(6, {"sweep"}), 1);
  const auto two = bnn_init_sweep(d, {0.1, 0.2}, 2, cfg, StreamKey(6, {"sweep"}), 2);
  REQUIRE(one.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(one[i].trace.rows == two[i].trace.rows);
}
