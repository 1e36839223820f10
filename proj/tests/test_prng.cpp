#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "groklab/prng.hpp"

using namespace grok;

// Known-answer vectors published with the Random123 reference implementation.
TEST_CASE("philox4x32-10 known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  using A2 = std::array<std::uint32_t, 2>;
  CHECK(philox4x32_10(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same key gives identical normals") {
  const StreamKey key(42, {"sweep", "add", 20, 3});
  Stream a(key), b(key);
  for (int i = 0; i < 1000; ++i) CHECK(a.standard_normal() == b.standard_normal());
  Stream c(StreamKey(42, {"sweep", "add", 20, 3}));
  Stream d = derive_stream(key);
  for (int i = 0; i < 1000; ++i) REQUIRE(c.uniform64() == d.uniform64());
}

TEST_CASE("keys differing in one label give different streams") {
  Stream a(StreamKey(42, {"sweep", "add", 20, 3}));
  Stream b(StreamKey(42, {"sweep", "add", 20, 4}));
  int differ = 0;
  for (int i = 0; i < 1000; ++i) differ += a.standard_normal() != b.standard_normal();
  CHECK(differ >= 990);

  // String and integer labels with the same spelling are distinct.
  CHECK(StreamKey(1, {"3"}).label_hash() != StreamKey(1, {3}).label_hash());
  // Master seed enters the Philox key, not the label hash.
  Stream m1(StreamKey(1, {"x"})), m2(StreamKey(2, {"x"}));
  CHECK(m1.uniform64() != m2.uniform64());
}

TEST_CASE("child keys extend the label path") {
  const StreamKey base(7, {"a"});
  CHECK(base.child("b") == StreamKey(7, {"a", "b"}));
  CHECK(base.child(std::size_t{3}).to_string() == "7/a/3");
}

TEST_CASE("standard normal moments") {
  Stream s(StreamKey(9, {"moments"}));
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = s.standard_normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) <= 0.01);
  CHECK(std::abs(var - 1.0) <= 0.02);
}

TEST_CASE("Box-Muller follows the documented transform") {
  const StreamKey key(11, {"bm"});
  Stream u(key), z(key);
  const double u1 = u.uniform_unit(), u2 = u.uniform_unit();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double two_pi = 2.0 * 3.14159265358979323846;
  CHECK(z.standard_normal() == doctest::Approx(r * std::cos(two_pi * u2)).epsilon(1e-15));
  CHECK(z.standard_normal() == doctest::Approx(r * std::sin(two_pi * u2)).epsilon(1e-15));
}

TEST_CASE("uniform helpers") {
  Stream s(StreamKey(12, {"uniform"}));
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform_unit();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const auto k = s.uniform_index(7);
    REQUIRE(k < 7);
    seen.insert(k);
  }
  CHECK(seen.size() == 7);

  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  Stream s1(StreamKey(13, {"shuffle"})), s2(StreamKey(13, {"shuffle"}));
  auto w = v;
  s1.shuffle(v.begin(), v.end());
  s2.shuffle(w.begin(), w.end());
  CHECK(v == w);
  std::sort(w.begin(), w.end());
  CHECK(w == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
}
