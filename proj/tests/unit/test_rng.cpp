#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "tgraph/rng.hpp"

using namespace tgraph;
using Words = std::array<std::uint32_t, 4>;

// Known-answer vectors of the Random123 distribution (kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Words{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Words{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Words{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  Rng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool differ_c = false, differ_d = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differ_c |= x != c.next_u64();
    differ_d |= x != d.next_u64();
  }
  CHECK(differ_c);
  CHECK(differ_d);
}

TEST_CASE("uniform and normal moments") {
  Rng rng(3);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::abs(su / n - 0.5) < 0.005);
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(std::abs(sn2 / n - 1.0) < 0.02);
}

TEST_CASE("uniform_int covers its range") {
  Rng rng(9);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = rng.uniform_int(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK_THROWS_AS(rng.uniform_int(0), std::invalid_argument);
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(20), b(20);
  for (int i = 0; i < 20; ++i) a[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(i)] = i;
  Rng r1(5), r2(5);
  r1.shuffle(a);
  r2.shuffle(b);
  CHECK(a == b);
  CHECK(std::set<int>(a.begin(), a.end()).size() == 20);
}

TEST_CASE("stable_hash and mix64 are fixed functions") {
  CHECK(stable_hash("data") == stable_hash("data"));
  CHECK(stable_hash("data") != stable_hash("graph"));
  CHECK(mix64(0) != mix64(1));
  CHECK(Rng::kName == "philox4x32-10+box-muller/v1");
}
