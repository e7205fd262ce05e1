#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace serlab::sampling {

inline constexpr std::size_t kNumClasses = 8;

// Ordered batches of indices into a training split.
struct BatchPlan {
  std::vector<std::vector<std::size_t>> batches;

  std::size_t size() const { return batches.size(); }
};

// ceil(N / B) batches, each holding exactly B / 8 samples of every class.
// Each class is drawn from its own seeded shuffle; when a class runs out it
// is reshuffled, so minority classes are oversampled.
BatchPlan balanced_batches(std::span<const std::size_t> labels, std::size_t batch_size, std::uint64_t seed);

// A seeded permutation of 0..N-1 cut into batches of B; the last may be short.
BatchPlan shuffled_batches(std::size_t n, std::size_t batch_size, std::uint64_t seed);

}  // namespace serlab::sampling
