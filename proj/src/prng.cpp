#include "groklab/prng.hpp"

#include <cmath>
#include <numbers>

namespace grok {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_bytes(std::uint64_t& h, const unsigned char* p, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void fnv_u64(std::uint64_t& h, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  fnv_bytes(h, b, 8);
}

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

StreamKey StreamKey::child(Label label) const {
  StreamKey k = *this;
  k.labels_.push_back(std::move(label));
  return k;
}

std::uint64_t StreamKey::label_hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_u64(h, labels_.size());
  for (const auto& l : labels_) {
    if (const auto* i = std::get_if<std::int64_t>(&l)) {
      const unsigned char tag = 'i';
      fnv_bytes(h, &tag, 1);
      fnv_u64(h, static_cast<std::uint64_t>(*i));
    } else {
      const auto& s = std::get<std::string>(l);
      const unsigned char tag = 's';
      fnv_bytes(h, &tag, 1);
      fnv_u64(h, s.size());
      fnv_bytes(h, reinterpret_cast<const unsigned char*>(s.data()), s.size());
    }
  }
  return splitmix_finalize(h);
}

std::string StreamKey::to_string() const {
  std::string s = std::to_string(master_seed_);
  for (const auto& l : labels_) {
    s += '/';
    if (const auto* i = std::get_if<std::int64_t>(&l))
      s += std::to_string(*i);
    else
      s += std::get<std::string>(l);
  }
  return s;
}

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

Stream::Stream(const StreamKey& key)
    : key_{static_cast<std::uint32_t>(key.master_seed()), static_cast<std::uint32_t>(key.master_seed() >> 32)},
      label_hash_(key.label_hash()) {}

std::uint64_t Stream::uniform64() {
  if (buffered_ == 0) {
    const auto out = philox4x32_10({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                    static_cast<std::uint32_t>(label_hash_),
                                    static_cast<std::uint32_t>(label_hash_ >> 32)},
                                   key_);
    ++block_;
    buffer_[0] = static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
    buffer_[1] = static_cast<std::uint64_t>(out[2]) | (static_cast<std::uint64_t>(out[3]) << 32);
    buffered_ = 2;
  }
  return buffer_[2 - buffered_--];
}

double Stream::uniform_unit() { return static_cast<double>(uniform64() >> 11) * 0x1.0p-53; }

double Stream::standard_normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = 1.0 - uniform_unit();  // (0, 1]
  const double u2 = uniform_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::uint64_t Stream::uniform_index(std::uint64_t n) {
  // Rejection on the top of the range keeps the result unbiased.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
  std::uint64_t v;
  do {
    v = uniform64();
  } while (v >= limit);
  return v % n;
}

}  // namespace grok
