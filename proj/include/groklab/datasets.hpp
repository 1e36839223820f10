#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "groklab/linalg.hpp"
#include "groklab/prng.hpp"

namespace grok {

struct DatasetMeta {
  std::string id;
  std::map<std::string, double> params;
  StreamKey key;
  std::size_t input_dim = 0;
  std::size_t num_classes = 0;  // 0 for regression targets
};

// Train/validation split. `*_y` carries the numeric target of each example
// (parity in {-1,+1}, class index, regression value); `*_labels` carries the
// class index used by classifiers and accuracy metrics (empty for pure
// regression tasks).
struct SplitDataset {
  Matrix train_x;
  Vector train_y;
  std::vector<int> train_labels;
  Matrix val_x;
  Vector val_y;
  std::vector<int> val_labels;
  DatasetMeta meta;

  std::size_t n_train() const { return train_x.rows(); }
  std::size_t n_val() const { return val_x.rows(); }
};

enum class ModularOp { add, sub, div, poly, ext_poly, ext_mult };

const char* to_string(ModularOp op);
ModularOp modular_op_from_string(const std::string& name);
const std::vector<ModularOp>& all_modular_ops();

// Target of `op` on operands (x, y) modulo p. div requires y != 0.
int modular_target(ModularOp op, int x, int y, int p);
bool is_prime(int p);

enum class ParitySampling {
  automatic,          // distinct when 2^k <= 2^20 and the universe is large enough
  distinct,           // without replacement; InsufficientUniverse if impossible
  with_replacement,
};

SplitDataset gen_parity(int k, std::size_t n_train, std::size_t n_val, const StreamKey& key,
                        ParitySampling sampling = ParitySampling::automatic);
// Product of the sequence under 0 -> -1, 1 -> +1.
int parity_target(std::span<const double> bits);

// Disjoint split: a random round(train_fraction * |grid|) subset of the
// operand grid trains, the rest validates.
SplitDataset gen_modular(ModularOp op, int p, double train_fraction, const StreamKey& key);
// Both splits drawn i.i.d. with replacement from the operand grid, so
// validation pairs generally also occur in training. Under concealment this
// makes generalisation a matter of ignoring the appended noise dimensions.
SplitDataset gen_modular_sampled(ModularOp op, int p, std::size_t n_train, std::size_t n_val, const StreamKey& key);

SplitDataset gen_zero_one(std::size_t n_train, std::size_t n_val, const StreamKey& key);
SplitDataset gen_zero_one_slope(std::size_t n_train, std::size_t n_val, const StreamKey& key);

inline constexpr double kSlope = 0.3;

// [x0, x0^2, x0^3, sin(100 x0)]
Vector slope_features(double x0);
// Applies slope_features to every row of a single-column matrix.
Matrix expand_slope_features(const Matrix& x0);

struct SineParams {
  double amplitude = 1.0;
  double frequency = 0.31830988618379067;  // 1/pi
  double phase = 0.0;
  double noise = 0.1;
  double x_min = -3.141592653589793;
  double x_max = 3.141592653589793;
  double x_jitter = 1.0;  // std of the N(0,1)-shaped perturbation of training inputs
};

// Training inputs: uniform grid on [x_min, x_max] plus x_jitter * N(0,1).
// Validation inputs: clean uniform grid on the same interval.
SplitDataset gen_sine(std::size_t n_train, std::size_t n_val, const SineParams& params, const StreamKey& key);
double sine_clean(double x, const SineParams& params);

// Appends `extra_dims` i.i.d. standard normal columns drawn row by row.
Matrix conceal(const Matrix& x, std::size_t extra_dims, Stream& stream);
Matrix conceal(const Matrix& x, std::size_t extra_dims, const StreamKey& key);
// Conceals both splits with independent child streams ("train", "val").
SplitDataset conceal(SplitDataset data, std::size_t extra_dims, const StreamKey& key);

}  // namespace grok
