#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "groklab/datasets.hpp"
#include "groklab/linalg.hpp"
#include "groklab/optim.hpp"
#include "groklab/trace.hpp"

namespace grok {

// ARD-RBF hyperparameters, all in log space. log_noise is ignored by the
// classification model.
struct KernelHyperparams {
  double log_amplitude = 0.0;
  Vector log_lengthscales;
  double log_noise = -2.302585092994046;  // ln 0.1

  static KernelHyperparams isotropic(std::size_t d, double lengthscale, double amplitude, double noise = 0.1);

  double amplitude() const;
  double noise() const;
  std::size_t dim() const { return log_lengthscales.size(); }

  // Packed order: ln alpha, ln l_1..ln l_d, ln sigma_n.
  Vector pack() const;
  static KernelHyperparams unpack(std::span<const double> v);
  // Geometric mean of the lengthscales; the shared value for isotropic kernels.
  double mean_lengthscale() const;
};

// K[i][j] = alpha * exp(-1/2 sum_d (x1_id - x2_jd)^2 / l_d^2)
Matrix rbf_kernel(const Matrix& x1, const Matrix& x2, const KernelHyperparams& hyp);
// dK/d ln l_d for a square kernel matrix K = rbf_kernel(x, x, hyp).
Matrix rbf_lengthscale_derivative(const Matrix& x, const Matrix& k, const KernelHyperparams& hyp, std::size_t d);

// Exact factorisation first; on failure falls back to escalating jitter
// starting at kDefaultJitter.
LowerTriangular factor_kernel(const Matrix& k);

struct LmlBreakdown {
  double data_fit = 0.0;       // 1/2 y^T K^-1 y
  double complexity = 0.0;     // 1/2 ln|K|
  double normalization = 0.0;  // n/2 ln 2 pi
  double total = 0.0;          // -(data_fit + complexity + normalization)
};

LmlBreakdown lml(const Matrix& x, const Vector& y, const KernelHyperparams& hyp);
// Gradient of lml(...).total in packed order (see KernelHyperparams::pack).
Vector lml_grad(const Matrix& x, const Vector& y, const KernelHyperparams& hyp);

struct GpPrediction {
  Vector mean;
  Vector variance;  // includes sigma_n^2, clamped at 0
};

GpPrediction predict(const Matrix& x, const Vector& y, const KernelHyperparams& hyp, const Matrix& xstar);

double mean_squared_error(const Vector& a, const Vector& b);

struct GprFitConfig {
  AdamConfig adam{};
  std::size_t epochs = 500;
  bool learn_noise = true;
};

struct GprEpoch {
  KernelHyperparams hyp;
  LmlBreakdown lml;
  double train_mse = 0.0;
  double val_mse = 0.0;
};

struct GprFit {
  // data_fit and complexity as in LmlBreakdown, train_loss = their sum.
  // Accuracies are not defined for regression and are stored as NaN.
  TrainingTrace trace;
  KernelHyperparams hyp;
  std::vector<GprEpoch> epochs;  // one per trace row
};

// Adam ascent on the log marginal likelihood.
GprFit fit_gpr(const SplitDataset& data, const KernelHyperparams& hyp0, const GprFitConfig& cfg);

struct GridConfig {
  std::size_t n_lengthscale = 60;
  std::size_t n_amplitude = 60;
  double lengthscale_min = 1e-2;
  double lengthscale_max = 1e1;
  double amplitude_min = 1e-2;
  double amplitude_max = 1e1;
};

// n points log-spaced over [lo, hi]; a single point sits at lo.
Vector log_space(double lo, double hi, std::size_t n);

struct NamedInit {
  std::string label;
  KernelHyperparams hyp;
};

struct TrajectoryPoint {
  std::size_t step = 0;
  double lengthscale = 0.0;
  double amplitude = 0.0;
  double data_fit = 0.0;
  double complexity = 0.0;
  double total = 0.0;
  double val_mse = 0.0;  // NaN where not applicable
  double train_mse = 0.0;
};

struct Trajectory {
  std::string label;
  std::vector<TrajectoryPoint> points;
};

struct LandscapeScan {
  Vector axis_lengthscale;
  Vector axis_amplitude;
  // Row index = lengthscale, column index = amplitude.
  Matrix data_fit;
  Matrix complexity;
  Matrix total;
  std::vector<Trajectory> trajectories;
};

// Landscape init presets.
KernelHyperparams preset_helc(std::size_t d);  // A: long lengthscale, tiny amplitude
KernelHyperparams preset_lehc(std::size_t d);  // B: tiny lengthscale, large amplitude
KernelHyperparams preset_lelc(std::size_t d);  // C: near-optimal
std::vector<NamedInit> default_landscape_inits(std::size_t d);

// Evaluates the LML breakdown over a (shared lengthscale, amplitude) grid
// with sigma_n fixed at `noise`, then fits from each init with the noise
// frozen and records the trajectory on the same plane.
LandscapeScan landscape_scan(const SplitDataset& data, const GridConfig& grid, double noise,
                             const std::vector<NamedInit>& inits, const GprFitConfig& cfg);

// Delayed validation improvement. e_train is the first epoch from which the
// train MSE stays at or below (1 + tolerance) times its final value; e_val the
// first epoch whose validation MSE is at most (1 - drop) times the initial one.
struct DelayedDrop {
  std::optional<std::size_t> e_train;
  std::optional<std::size_t> e_val;
  bool delayed = false;  // both present and e_val - e_train >= min_delay
};

DelayedDrop detect_delayed_drop(const std::vector<double>& train_mse, const std::vector<double>& val_mse,
                                double tolerance = 0.1, double drop = 0.5, std::size_t min_delay = 50);

}  // namespace grok
