#include "serlab/numerics/param_store.hpp"

#include "serlab/common/error.hpp"

namespace serlab::numerics {

void ParamStore::add(const std::string& name, Tensor value) {
  if (name.empty()) throw ValidationError("parameter name must be non-empty");
  if (value.empty()) throw ValidationError("parameter '" + name + "' has no data");
  if (contains(name)) throw ValidationError("duplicate parameter name '" + name + "'");
  grads_.emplace(name, Tensor::zeros(value.shape()));
  values_.emplace(name, std::move(value));
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(values_.size());
  for (const auto& [name, _] : values_) out.push_back(name);
  return out;
}

const Tensor& ParamStore::value(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end()) throw ValidationError("missing parameter tensor '" + name + "'");
  return it->second;
}

Tensor& ParamStore::value(const std::string& name) {
  auto it = values_.find(name);
  if (it == values_.end()) throw ValidationError("missing parameter tensor '" + name + "'");
  return it->second;
}

const Tensor& ParamStore::grad(const std::string& name) const {
  auto it = grads_.find(name);
  if (it == grads_.end()) throw ValidationError("missing parameter tensor '" + name + "'");
  return it->second;
}

Tensor& ParamStore::grad(const std::string& name) {
  auto it = grads_.find(name);
  if (it == grads_.end()) throw ValidationError("missing parameter tensor '" + name + "'");
  return it->second;
}

void ParamStore::set_grad(const std::string& name, Tensor grad) {
  Tensor& slot = this->grad(name);
  if (grad.shape() != slot.shape()) {
    throw ValidationError("gradient shape " + shape_str(grad.shape()) + " does not match parameter '" + name +
                          "' shape " + shape_str(slot.shape()));
  }
  slot = std::move(grad);
}

void ParamStore::zero_grad() {
  for (auto& [name, g] : grads_) g = Tensor::zeros(g.shape());
}

void ParamStore::merge(const ParamStore& other) {
  for (const auto& [name, v] : other.values_) add(name, v);
}

ParamStore ParamStore::subset(const std::string& prefix) const {
  ParamStore out;
  for (const auto& [name, v] : values_) {
    if (name.compare(0, prefix.size(), prefix) == 0) out.add(name, v);
  }
  return out;
}

}  // namespace serlab::numerics
