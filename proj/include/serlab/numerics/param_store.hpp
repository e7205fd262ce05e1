#pragma once

#include <map>
#include <string>
#include <vector>

#include "serlab/numerics/tensor.hpp"

namespace serlab::numerics {

// Named parameters with a gradient slot of identical shape per name.
// Iteration order is the lexicographic order of names.
class ParamStore {
 public:
  void add(const std::string& name, Tensor value);
  bool contains(const std::string& name) const { return values_.count(name) != 0; }
  std::size_t size() const { return values_.size(); }
  std::vector<std::string> names() const;

  const Tensor& value(const std::string& name) const;
  Tensor& value(const std::string& name);
  const Tensor& grad(const std::string& name) const;
  Tensor& grad(const std::string& name);

  // Overwrites the gradient; shape must match the parameter.
  void set_grad(const std::string& name, Tensor grad);
  void zero_grad();

  // Copies every parameter of `other` in (names must not collide).
  void merge(const ParamStore& other);
  // Keeps only names that start with `prefix`.
  ParamStore subset(const std::string& prefix) const;

  const std::map<std::string, Tensor>& values() const { return values_; }

 private:
  std::map<std::string, Tensor> values_;
  std::map<std::string, Tensor> grads_;
};

}  // namespace serlab::numerics
