#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace tgraph {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/**
 * Counter-based random stream.
 *
 * The stream is a pure function of (seed, stream id, draw index): the seed
 * is the Philox key, the upper half of the counter carries the stream id and
 * the lower half counts blocks. Distributions are implemented here rather
 * than taken from <random>, whose distribution algorithms are
 * implementation-defined, so draws are identical across standard libraries.
 */
class Rng {
 public:
  static constexpr std::string_view kName = "philox4x32-10+box-muller/v1";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, n); n > 0.
  std::uint64_t uniform_int(std::uint64_t n);
  double normal();
  bool bernoulli(double prob) { return uniform() < prob; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stable 64-bit mix (splitmix64 finaliser) for deriving stream ids.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over a byte string, finalised with mix64.
std::uint64_t stable_hash(std::string_view s);

}  // namespace tgraph
