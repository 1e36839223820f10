#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "groklab/datasets.hpp"
#include "groklab/gp_regression.hpp"
#include "groklab/linalg.hpp"
#include "groklab/optim.hpp"
#include "groklab/trace.hpp"

namespace grok {

// Nodes and weights for int exp(-x^2) g(x) dx, ascending nodes.
struct GaussHermite {
  Vector nodes;
  Vector weights;
};
GaussHermite gauss_hermite(int order);

double log_normal_cdf(double z);
// phi(z) / Phi(z), stable for very negative z.
double inverse_mills(double z);
double normal_cdf(double z);

// q(f) = N(mu, L L^T).
struct VariationalPosterior {
  Vector mu;
  LowerTriangular chol_cov;
};

struct GpcModel {
  KernelHyperparams hyp;  // log_noise unused
  VariationalPosterior q;
  Matrix train_x;
};

// Prior covariance used by the classifier: K_f + kDefaultJitter * I.
Matrix gpc_prior_cov(const Matrix& x, const KernelHyperparams& hyp);

struct ElboBreakdown {
  double expected_loglik = 0.0;
  double kl = 0.0;
  double elbo = 0.0;      // -(data_fit + beta * complexity)
  double data_fit = 0.0;  // -expected_loglik
  double complexity = 0.0;  // kl
};

// KL(N(mu_q, Lq Lq^T) || N(0, Lp Lp^T)).
double kl_gaussians(const Vector& mu_q, const LowerTriangular& chol_q, const LowerTriangular& chol_p);

// Probit likelihood; y01 holds 0/1 labels.
ElboBreakdown elbo(const GpcModel& model, const std::vector<int>& y01, double beta, int quad_order);

struct ElboGrad {
  Vector mu;
  Matrix chol;  // d elbo / d L_ij on the lower triangle, zero above
  Vector hyp;   // ln alpha, ln l_1..ln l_d
};

// Exact gradient of the quadrature-discretised bound.
ElboGrad elbo_grad(const GpcModel& model, const std::vector<int>& y01, double beta, int quad_order);

// Predictive probability of label 1: Phi(m / sqrt(1 + v)).
Vector predict_proba(const GpcModel& model, const Matrix& xstar);
// Same integral by quadrature; used to cross-check the closed form.
Vector predict_proba_quadrature(const GpcModel& model, const Matrix& xstar, int quad_order);
std::vector<int> predict_labels(const GpcModel& model, const Matrix& xstar);

struct GpcConfig {
  double beta = 1.0;
  int quad_order = 20;
  AdamConfig adam{};
  std::size_t epochs = 1000;
  double init_lengthscale = 1.0;
  double init_amplitude = 1.0;
};

struct GpcFit {
  // data_fit = -expected loglik, complexity = KL, train_loss = -elbo.
  TrainingTrace trace;
  GpcModel model;
  std::vector<KernelHyperparams> hyp_path;  // one per trace row
  std::vector<ElboBreakdown> breakdowns;    // one per trace row
};

// q starts at the prior: mu = 0, L = chol(K(hyp0)).
GpcFit fit_gpc(const SplitDataset& data, const GpcConfig& cfg);
GpcFit fit_gpc(const SplitDataset& data, const KernelHyperparams& hyp0, const GpcConfig& cfg);

enum class LaplaceLikelihood { probit, gaussian };

struct LaplaceConfig {
  LaplaceLikelihood likelihood = LaplaceLikelihood::probit;
  double noise = 0.1;  // std of the gaussian variant
  int max_iterations = 100;
  double tolerance = 1e-10;
};

struct LaplaceBreakdown {
  Vector mode;
  double data_fit_term = 0.0;   // -1/2 f^T K^-1 f + log p(y|f) at the mode
  double complexity_term = 0.0;  // 1/2 ln|B|, B = I + W^1/2 K W^1/2
  double total = 0.0;           // data_fit_term - complexity_term
  int iterations = 0;
};

// For the probit likelihood `y` holds 0/1 labels; for the gaussian variant it
// holds real targets.
LaplaceBreakdown laplace(const Matrix& x, const Vector& y, const KernelHyperparams& hyp, const LaplaceConfig& cfg = {});
// Gradient of log p(y|f) - 1/2 f^T K^-1 f at f.
Vector laplace_objective_grad(const Matrix& x, const Vector& y, const KernelHyperparams& hyp, const Vector& f,
                              const LaplaceConfig& cfg = {});

// Presets for the classification landscape, named after the region they
// start in.
std::vector<NamedInit> default_gpc_inits(std::size_t d);

// LandscapeScan surfaces hold the Laplace data-fit term, complexity term and
// total over the grid; trajectories come from fit_gpc and store the
// variational data fit (-expected loglik), KL and elbo.
LandscapeScan laplace_surface(const SplitDataset& data, const GridConfig& grid, const std::vector<NamedInit>& inits,
                              const GpcConfig& cfg);

}  // namespace grok
