#include "groklab/datasets.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "groklab/errors.hpp"

namespace grok {

const char* to_string(ModularOp op) {
  switch (op) {
    case ModularOp::add: return "add";
    case ModularOp::sub: return "sub";
    case ModularOp::div: return "div";
    case ModularOp::poly: return "poly";
    case ModularOp::ext_poly: return "ext_poly";
    case ModularOp::ext_mult: return "ext_mult";
  }
  return "?";
}

ModularOp modular_op_from_string(const std::string& name) {
  for (ModularOp op : all_modular_ops())
    if (name == to_string(op)) return op;
  throw InvalidArgument("unknown modular operation '" + name + "'");
}

const std::vector<ModularOp>& all_modular_ops() {
  static const std::vector<ModularOp> ops = {ModularOp::add,  ModularOp::sub,      ModularOp::div,
                                             ModularOp::poly, ModularOp::ext_poly, ModularOp::ext_mult};
  return ops;
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

namespace {

long long mod(long long a, long long p) { return ((a % p) + p) % p; }

long long pow_mod(long long base, long long e, long long p) {
  long long r = 1;
  base = mod(base, p);
  while (e > 0) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return r;
}

}  // namespace

int modular_target(ModularOp op, int x, int y, int p) {
  const long long a = x, b = y;
  switch (op) {
    case ModularOp::add: return static_cast<int>(mod(a + b, p));
    case ModularOp::sub: return static_cast<int>(mod(a - b, p));
    case ModularOp::div:
      if (mod(b, p) == 0) throw InvalidArgument("modular division by zero");
      return static_cast<int>(mod(a * pow_mod(b, p - 2, p), p));
    case ModularOp::poly: return static_cast<int>(mod(a * a + a * b + b * b, p));
    case ModularOp::ext_poly: return static_cast<int>(mod(a * a + a * b + b * b + a, p));
    case ModularOp::ext_mult: return static_cast<int>(mod(a * b % p * a, p));
  }
  return 0;
}

int parity_target(std::span<const double> bits) {
  int y = 1;
  for (double b : bits) y *= (b != 0.0) ? 1 : -1;
  return y;
}

SplitDataset gen_parity(int k, std::size_t n_train, std::size_t n_val, const StreamKey& key,
                        ParitySampling sampling) {
  if (k < 1) throw InvalidArgument("gen_parity: k must be >= 1");
  if (n_train < 1 || n_val < 1) throw InvalidArgument("gen_parity: split sizes must be >= 1");
  const std::size_t total = n_train + n_val;
  const bool small = k <= 20;
  const std::uint64_t universe = small ? (std::uint64_t{1} << k) : 0;
  bool distinct = false;
  switch (sampling) {
    case ParitySampling::distinct:
      if (!small || total > universe)
        throw InsufficientUniverse("gen_parity: cannot draw " + std::to_string(total) + " distinct sequences of length " +
                                   std::to_string(k));
      distinct = true;
      break;
    case ParitySampling::automatic: distinct = small && total <= universe; break;
    case ParitySampling::with_replacement: distinct = false; break;
  }

  Stream stream(key);
  Matrix all(total, static_cast<std::size_t>(k));
  if (distinct) {
    std::vector<std::uint32_t> codes(universe);
    std::iota(codes.begin(), codes.end(), 0u);
    // Partial Fisher-Yates: the first `total` slots are a uniform sample.
    for (std::size_t i = 0; i < total; ++i) {
      const auto j = i + stream.uniform_index(universe - i);
      std::swap(codes[i], codes[j]);
      for (int b = 0; b < k; ++b) all(i, static_cast<std::size_t>(b)) = (codes[i] >> b) & 1u;
    }
  } else {
    for (std::size_t i = 0; i < total; ++i)
      for (int b = 0; b < k; ++b) all(i, static_cast<std::size_t>(b)) = static_cast<double>(stream.uniform64() >> 63);
  }

  SplitDataset d;
  d.train_x = Matrix(n_train, static_cast<std::size_t>(k));
  d.val_x = Matrix(n_val, static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < total; ++i) {
    const bool train = i < n_train;
    Matrix& dst = train ? d.train_x : d.val_x;
    const std::size_t r = train ? i : i - n_train;
    for (int b = 0; b < k; ++b) dst(r, static_cast<std::size_t>(b)) = all(i, static_cast<std::size_t>(b));
    const int y = parity_target(all.row(i));
    (train ? d.train_y : d.val_y).push_back(y);
    (train ? d.train_labels : d.val_labels).push_back(y > 0 ? 1 : 0);
  }
  d.meta = {"parity",
            {{"k", k}, {"n_train", static_cast<double>(n_train)}, {"n_val", static_cast<double>(n_val)},
             {"distinct", distinct ? 1.0 : 0.0}},
            key,
            static_cast<std::size_t>(k),
            2};
  return d;
}

SplitDataset gen_modular(ModularOp op, int p, double train_fraction, const StreamKey& key) {
  if (!is_prime(p)) throw NotPrime("gen_modular: " + std::to_string(p) + " is not prime");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidFraction("gen_modular: train_fraction must lie in (0, 1)");

  std::vector<std::pair<int, int>> grid;
  const int y_start = op == ModularOp::div ? 1 : 0;
  for (int x = 0; x < p; ++x)
    for (int y = y_start; y < p; ++y) grid.emplace_back(x, y);

  const auto n = grid.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n)
    throw InvalidFraction("gen_modular: train_fraction leaves an empty split");

  Stream stream(key);
  stream.shuffle(grid.begin(), grid.end());

  const auto dim = static_cast<std::size_t>(2 * p);
  SplitDataset d;
  d.train_x = Matrix(n_train, dim);
  d.val_x = Matrix(n - n_train, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const bool train = i < n_train;
    Matrix& dst = train ? d.train_x : d.val_x;
    const std::size_t r = train ? i : i - n_train;
    const auto [x, y] = grid[i];
    dst(r, static_cast<std::size_t>(x)) = 1.0;
    dst(r, static_cast<std::size_t>(p + y)) = 1.0;
    const int t = modular_target(op, x, y, p);
    (train ? d.train_y : d.val_y).push_back(t);
    (train ? d.train_labels : d.val_labels).push_back(t);
  }
  d.meta = {std::string("mod_") + to_string(op),
            {{"p", p}, {"train_fraction", train_fraction}},
            key,
            dim,
            static_cast<std::size_t>(p)};
  return d;
}

SplitDataset gen_modular_sampled(ModularOp op, int p, std::size_t n_train, std::size_t n_val, const StreamKey& key) {
  if (!is_prime(p)) throw NotPrime("gen_modular_sampled: " + std::to_string(p) + " is not prime");
  if (n_train < 1 || n_val < 1) throw InvalidArgument("gen_modular_sampled: split sizes must be >= 1");
  Stream stream(key);
  const int y_start = op == ModularOp::div ? 1 : 0;
  const auto dim = static_cast<std::size_t>(2 * p);
  SplitDataset d;
  d.train_x = Matrix(n_train, dim);
  d.val_x = Matrix(n_val, dim);
  for (std::size_t i = 0; i < n_train + n_val; ++i) {
    const bool train = i < n_train;
    const int x = static_cast<int>(stream.uniform_index(static_cast<std::uint64_t>(p)));
    const int y = y_start + static_cast<int>(stream.uniform_index(static_cast<std::uint64_t>(p - y_start)));
    Matrix& dst = train ? d.train_x : d.val_x;
    const std::size_t r = train ? i : i - n_train;
    dst(r, static_cast<std::size_t>(x)) = 1.0;
    dst(r, static_cast<std::size_t>(p + y)) = 1.0;
    const int t = modular_target(op, x, y, p);
    (train ? d.train_y : d.val_y).push_back(t);
    (train ? d.train_labels : d.val_labels).push_back(t);
  }
  d.meta = {std::string("mod_") + to_string(op),
            {{"p", p}, {"n_train", static_cast<double>(n_train)}, {"n_val", static_cast<double>(n_val)}, {"sampled", 1}},
            key,
            dim,
            static_cast<std::size_t>(p)};
  return d;
}

namespace {

SplitDataset gaussian_scalar(std::size_t n_train, std::size_t n_val, const StreamKey& key, double slope) {
  if (n_train < 1 || n_val < 1) throw InvalidArgument("split sizes must be >= 1");
  Stream stream(key);
  SplitDataset d;
  d.train_x = Matrix(n_train, 1);
  d.val_x = Matrix(n_val, 1);
  for (std::size_t i = 0; i < n_train + n_val; ++i) {
    const bool train = i < n_train;
    const double x = stream.standard_normal();
    (train ? d.train_x : d.val_x)(train ? i : i - n_train, 0) = x;
    const int label = x > 0.0 ? 1 : 0;
    (train ? d.train_y : d.val_y).push_back(slope > 0.0 ? slope * x : label);
    (train ? d.train_labels : d.val_labels).push_back(label);
  }
  return d;
}

}  // namespace

SplitDataset gen_zero_one(std::size_t n_train, std::size_t n_val, const StreamKey& key) {
  auto d = gaussian_scalar(n_train, n_val, key, 0.0);
  d.meta = {"zero_one", {{"n_train", static_cast<double>(n_train)}, {"n_val", static_cast<double>(n_val)}}, key, 1, 2};
  return d;
}

SplitDataset gen_zero_one_slope(std::size_t n_train, std::size_t n_val, const StreamKey& key) {
  auto d = gaussian_scalar(n_train, n_val, key, kSlope);
  d.meta = {"zero_one_slope",
            {{"n_train", static_cast<double>(n_train)}, {"n_val", static_cast<double>(n_val)}, {"slope", kSlope}},
            key,
            1,
            2};
  return d;
}

Vector slope_features(double x0) { return {x0, x0 * x0, x0 * x0 * x0, std::sin(100.0 * x0)}; }

Matrix expand_slope_features(const Matrix& x0) {
  if (x0.cols() != 1) throw DimensionMismatch("expand_slope_features: expected one column");
  Matrix out(x0.rows(), 4);
  for (std::size_t i = 0; i < x0.rows(); ++i) {
    const auto f = slope_features(x0(i, 0));
    for (std::size_t j = 0; j < 4; ++j) out(i, j) = f[j];
  }
  return out;
}

double sine_clean(double x, const SineParams& p) {
  return p.amplitude * std::sin(2.0 * 3.141592653589793 * p.frequency * x + p.phase);
}

namespace {

double grid_point(std::size_t i, std::size_t n, double lo, double hi) {
  if (n == 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

SplitDataset gen_sine(std::size_t n_train, std::size_t n_val, const SineParams& p, const StreamKey& key) {
  if (n_train < 2) throw InvalidArgument("gen_sine: n_train must be >= 2");
  if (n_val < 1) throw InvalidArgument("gen_sine: n_val must be >= 1");
  Stream stream(key);
  SplitDataset d;
  d.train_x = Matrix(n_train, 1);
  d.val_x = Matrix(n_val, 1);
  for (std::size_t i = 0; i < n_train; ++i) {
    const double x = grid_point(i, n_train, p.x_min, p.x_max) + p.x_jitter * stream.standard_normal();
    d.train_x(i, 0) = x;
    d.train_y.push_back(sine_clean(x, p) + p.noise * stream.standard_normal());
  }
  for (std::size_t i = 0; i < n_val; ++i) {
    const double x = grid_point(i, n_val, p.x_min, p.x_max);
    d.val_x(i, 0) = x;
    d.val_y.push_back(sine_clean(x, p));
  }
  d.meta = {"sine",
            {{"A", p.amplitude}, {"f", p.frequency}, {"phi", p.phase}, {"B", p.noise}, {"x_min", p.x_min},
             {"x_max", p.x_max}, {"x_jitter", p.x_jitter}},
            key,
            1,
            0};
  return d;
}

Matrix conceal(const Matrix& x, std::size_t extra_dims, Stream& stream) {
  if (extra_dims == 0) return x;
  const std::size_t d = x.cols();
  Matrix out(x.rows(), d + extra_dims);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto src = x.row(i);
    auto dst = out.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
    for (std::size_t j = 0; j < extra_dims; ++j) dst[d + j] = stream.standard_normal();
  }
  return out;
}

Matrix conceal(const Matrix& x, std::size_t extra_dims, const StreamKey& key) {
  Stream s(key);
  return conceal(x, extra_dims, s);
}

SplitDataset conceal(SplitDataset data, std::size_t extra_dims, const StreamKey& key) {
  data.train_x = conceal(data.train_x, extra_dims, key.child("train"));
  data.val_x = conceal(data.val_x, extra_dims, key.child("val"));
  data.meta.params["extra_dims"] = static_cast<double>(extra_dims);
  data.meta.input_dim += extra_dims;
  return data;
}

}  // namespace grok
