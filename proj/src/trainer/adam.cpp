#include "serlab/trainer/adam.hpp"

#include <cmath>

#include "serlab/common/error.hpp"

namespace serlab::trainer {

void adam_step(numerics::ParamStore& params, std::span<const std::string> names, AdamState& state, double lr,
               const AdamConfig& cfg) {
  for (const auto& name : names) {
    if (params.grad(name).shape() != params.value(name).shape()) {
      throw ValidationError("adam: gradient shape mismatch for '" + name + "'");
    }
    auto [m_it, m_new] = state.m.try_emplace(name, numerics::Tensor::zeros(params.value(name).shape()));
    auto [v_it, v_new] = state.v.try_emplace(name, numerics::Tensor::zeros(params.value(name).shape()));
    if (m_it->second.shape() != params.value(name).shape() || v_it->second.shape() != params.value(name).shape()) {
      throw ValidationError("adam: state shape mismatch for '" + name + "'");
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  for (const auto& name : names) {
    auto p = params.value(name).data();
    auto g = params.grad(name).data();
    auto m = state.m.at(name).data();
    auto v = state.v.at(name).data();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace serlab::trainer
