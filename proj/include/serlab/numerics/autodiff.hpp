#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "serlab/numerics/param_store.hpp"
#include "serlab/numerics/tensor.hpp"

// Reverse-mode differentiation over a closed set of operations. A Tape
// records nodes in creation order, which is also a topological order, so
// backward() is a single reverse sweep.
namespace serlab::numerics {

enum class OpKind : std::uint8_t {
  kConstant,
  kVariable,
  kParameter,
  kMatMul,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kAddRow,
  kScale,
  kShift,
  kTanh,
  kExp,
  kLog,
  kSigmoid,
  kSoftplus,
  kMish,
  kRelu,
  kSquare,
  kSqrt,
  kClampMin,
  kPow,
  kSoftmax,
  kLogSoftmax,
  kConcat,
  kStackRows,
  kMean,
  kSum,
  kWeightedSum,
  kTranspose,
  kReshape,
  kPick,
};

const char* op_name(OpKind op);

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  bool valid() const { return tape_ != nullptr; }
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  struct Node {
    OpKind op;
    Tensor value;
    std::vector<std::size_t> inputs;
    double scalar = 0.0;
    std::size_t axis = 0;
    std::vector<std::size_t> indices;
    std::string name;
  };

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Non-differentiable input.
  Var constant(Tensor value);
  // Differentiable leaf not tied to a ParamStore (used by gradient checks).
  Var variable(Tensor value);
  // Binds a named parameter; binding the same name twice returns one node.
  Var parameter(const ParamStore& store, const std::string& name);

  void backward(Var loss);
  // Gradient of the last backward() target w.r.t. `v`; zeros if unreached.
  Tensor grad(Var v) const;
  Tensor grad_at(std::size_t id) const;

  std::size_t size() const { return nodes_.size(); }
  const Node& node(std::size_t id) const { return nodes_.at(id); }
  const std::map<std::string, std::size_t>& bound_parameters() const { return bound_; }

  Var record(Node node);

 private:
  std::vector<Node> nodes_;
  std::vector<Tensor> grads_;
  std::map<std::string, std::size_t> bound_;
};

// Runs backward from `loss` and overwrites every gradient in `params`:
// bound and reached parameters get their exact gradient, all others zero.
void backward(Var loss, ParamStore& params);

// 2-D matrix product.
Var matmul(Var a, Var b);
// Same-shape elementwise arithmetic.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
// Adds a length-C vector to every row of an R x C matrix.
Var add_row(Var m, Var row);
Var scale(Var a, double factor);
Var shift(Var a, double offset);

Var tanh(Var a);
Var exp(Var a);
Var log(Var a);
Var sigmoid(Var a);
Var softplus(Var a);
Var mish(Var a);
Var relu(Var a);
Var square(Var a);
Var sqrt(Var a);
Var clamp_min(Var a, double lo);
Var pow(Var a, double exponent);

Var softmax(Var a, std::size_t axis);
Var log_softmax(Var a, std::size_t axis);

// Joins rank-1 tensors end to end.
Var concat(std::span<const Var> parts);
// Stacks equal-length rank-1 tensors into a matrix, one per row.
Var stack_rows(std::span<const Var> rows);
// Arithmetic mean along `axis`; a rank-1 input reduces to shape [1].
Var mean(Var a, std::size_t axis);
Var sum(Var a);
// sum_t weights[t] * rows[t, :] for weights of length T and rows T x D.
Var weighted_sum(Var weights, Var rows);
Var transpose(Var a);
Var reshape(Var a, Shape shape);
// out[i] = a[i, columns[i]] for an R x C matrix.
Var pick(Var a, std::span<const std::size_t> columns);

}  // namespace serlab::numerics
