#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace serlab {

// xoshiro256** seeded through splitmix64. Every derived draw (integers,
// uniforms, normals, shuffles) is defined here so that sequences do not
// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits.
  double uniform();
  double uniform(double lo, double hi);
  // Uniform integer on [0, bound), bound > 0. Rejection-sampled, unbiased.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via Box-Muller (one output per call).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

// Derives an independent stream seed from a base seed and a tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace serlab
