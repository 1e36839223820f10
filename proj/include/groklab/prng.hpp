#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace grok {

// Identifies one random stream: a master seed plus an ordered path of labels
// such as {"sweep", "add", 20, 3}. Equal keys give bit-identical streams.
class StreamKey {
 public:
  using Label = std::variant<std::int64_t, std::string>;

  StreamKey() = default;
  explicit StreamKey(std::uint64_t master_seed, std::vector<Label> labels = {})
      : master_seed_(master_seed), labels_(std::move(labels)) {}

  StreamKey child(Label label) const;
  StreamKey child(const char* label) const { return child(Label(std::string(label))); }
  StreamKey child(int label) const { return child(Label(static_cast<std::int64_t>(label))); }
  StreamKey child(std::size_t label) const { return child(Label(static_cast<std::int64_t>(label))); }

  std::uint64_t master_seed() const { return master_seed_; }
  const std::vector<Label>& labels() const { return labels_; }

  // 64-bit digest of the label path; forms the high half of the counter.
  std::uint64_t label_hash() const;
  // Human readable form, e.g. "42/sweep/add/20/3".
  std::string to_string() const;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;

 private:
  std::uint64_t master_seed_ = 0;
  std::vector<Label> labels_;
};

// Philox4x32-10 block function. The counter is 128 bits, the key 64 bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Counter-based generator. Block i of a stream is
//   philox4x32_10({i_lo, i_hi, h_lo, h_hi}, {seed_lo, seed_hi})
// with h = key.label_hash(). Each block yields two 64-bit words (low word
// first). Distinct label hashes give disjoint counters, and Philox is a
// bijection on counters for a fixed key, so distinct streams never emit the
// same block.
//
// standard_normal uses Box-Muller on two consecutive uniforms u1, u2:
//   r = sqrt(-2 ln(1 - u1)), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2)
// returning z0 then z1.
class Stream {
 public:
  explicit Stream(const StreamKey& key);

  std::uint64_t uniform64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform_unit();
  double standard_normal();
  // Unbiased integer in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  template <class It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = uniform_index(i);
      std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1), first + static_cast<std::ptrdiff_t>(j));
    }
  }

 private:
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t label_hash_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  std::optional<double> spare_normal_;
};

inline Stream derive_stream(const StreamKey& key) { return Stream(key); }

}  // namespace grok
