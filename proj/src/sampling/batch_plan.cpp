#include "serlab/sampling/batch_plan.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "serlab/common/error.hpp"
#include "serlab/common/rng.hpp"

namespace serlab::sampling {
namespace {

// Endless stream over one class's indices: a fresh seeded shuffle per pass.
class ClassCycle {
 public:
  ClassCycle(std::vector<std::size_t> members, Rng& rng) : members_(std::move(members)), rng_(&rng) { refill(); }

  std::size_t next() {
    if (pos_ == members_.size()) refill();
    return members_[pos_++];
  }

 private:
  void refill() {
    rng_->shuffle(std::span<std::size_t>(members_));
    pos_ = 0;
  }

  std::vector<std::size_t> members_;
  Rng* rng_;
  std::size_t pos_ = 0;
};

}  // namespace

BatchPlan balanced_batches(std::span<const std::size_t> labels, std::size_t batch_size, std::uint64_t seed) {
  if (batch_size == 0 || batch_size % kNumClasses != 0) {
    throw ValidationError("balanced sampling needs a batch size divisible by 8, got " + std::to_string(batch_size));
  }
  std::vector<std::vector<std::size_t>> by_class(kNumClasses);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= kNumClasses) {
      throw ValidationError("label " + std::to_string(labels[i]) + " at index " + std::to_string(i) +
                            " out of range");
    }
    by_class[labels[i]].push_back(i);
  }
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (by_class[c].empty()) {
      throw ValidationError("balanced sampling: class " + std::to_string(c) + " missing from the training split");
    }
  }

  Rng rng(seed);
  std::vector<ClassCycle> cycles;
  cycles.reserve(kNumClasses);
  for (auto& members : by_class) cycles.emplace_back(std::move(members), rng);

  const std::size_t per_class = batch_size / kNumClasses;
  const std::size_t n_batches = (labels.size() + batch_size - 1) / batch_size;
  BatchPlan plan;
  plan.batches.reserve(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    std::vector<std::size_t> batch;
    batch.reserve(batch_size);
    for (auto& cycle : cycles) {
      for (std::size_t k = 0; k < per_class; ++k) batch.push_back(cycle.next());
    }
    rng.shuffle(std::span<std::size_t>(batch));
    plan.batches.push_back(std::move(batch));
  }
  return plan;
}

BatchPlan shuffled_batches(std::size_t n, std::size_t batch_size, std::uint64_t seed) {
  if (n == 0) throw ValidationError("shuffled_batches: empty split");
  if (batch_size == 0) throw ValidationError("shuffled_batches: batch size must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  BatchPlan plan;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    plan.batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                              order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return plan;
}

}  // namespace serlab::sampling
