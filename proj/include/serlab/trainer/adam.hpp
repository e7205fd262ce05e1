#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "serlab/numerics/param_store.hpp"

namespace serlab::trainer {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::map<std::string, numerics::Tensor> m;
  std::map<std::string, numerics::Tensor> v;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update of `names` using the gradients stored in
// `params`. No weight decay. Parameters not listed are left untouched.
void adam_step(numerics::ParamStore& params, std::span<const std::string> names, AdamState& state, double lr,
               const AdamConfig& cfg = {});

}  // namespace serlab::trainer
