#include "serlab/numerics/autodiff.hpp"

#include <cmath>

#include "lanes.hpp"
#include "serlab/common/error.hpp"
#include "serlab/numerics/kernels.hpp"

namespace serlab::numerics {

const char* op_name(OpKind op) {
  switch (op) {
    case OpKind::kConstant: return "constant";
    case OpKind::kVariable: return "variable";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kDiv: return "div";
    case OpKind::kAddRow: return "add_row";
    case OpKind::kScale: return "scale";
    case OpKind::kShift: return "shift";
    case OpKind::kTanh: return "tanh";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kSoftplus: return "softplus";
    case OpKind::kMish: return "mish";
    case OpKind::kRelu: return "relu";
    case OpKind::kSquare: return "square";
    case OpKind::kSqrt: return "sqrt";
    case OpKind::kClampMin: return "clamp_min";
    case OpKind::kPow: return "pow";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLogSoftmax: return "log_softmax";
    case OpKind::kConcat: return "concat";
    case OpKind::kStackRows: return "stack_rows";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
    case OpKind::kWeightedSum: return "weighted_sum";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kReshape: return "reshape";
    case OpKind::kPick: return "pick";
  }
  return "unknown";
}

const Tensor& Var::value() const {
  if (!tape_) throw ValidationError("use of an unbound Var");
  return tape_->node(id_).value;
}

// ---------------------------------------------------------------------------
// Tape

Var Tape::record(Node node) {
  const std::size_t id = nodes_.size();
  for (std::size_t in : node.inputs) {
    if (in >= id) {
      throw ValidationError(std::string(op_name(node.op)) + ": graph cycle (input node " + std::to_string(in) +
                            " is not older than node " + std::to_string(id) + ")");
    }
  }
  if (node.op != OpKind::kConstant) {
    const std::size_t bad = node.value.first_non_finite();
    if (bad != node.value.size()) {
      throw NumericError(std::string(op_name(node.op)) + ": produced non-finite value at index " +
                         std::to_string(bad));
    }
  }
  nodes_.push_back(std::move(node));
  return Var(this, id);
}

Var Tape::constant(Tensor value) {
  if (value.empty()) throw ValidationError("constant: empty tensor");
  return record({OpKind::kConstant, std::move(value), {}});
}

Var Tape::variable(Tensor value) {
  if (value.empty()) throw ValidationError("variable: empty tensor");
  return record({OpKind::kVariable, std::move(value), {}});
}

Var Tape::parameter(const ParamStore& store, const std::string& name) {
  if (auto it = bound_.find(name); it != bound_.end()) return Var(this, it->second);
  Node n{OpKind::kParameter, store.value(name), {}};
  n.name = name;
  Var v = record(std::move(n));
  bound_.emplace(name, v.id());
  return v;
}

Tensor Tape::grad(Var v) const {
  if (v.tape_ != this) throw ValidationError("grad: Var belongs to a different tape");
  return grad_at(v.id());
}

Tensor Tape::grad_at(std::size_t id) const {
  if (id < grads_.size() && !grads_[id].empty()) return grads_[id];
  return Tensor::zeros(node(id).value.shape());
}

namespace {

void accumulate(std::vector<Tensor>& grads, std::size_t id, const Shape& shape, const std::vector<double>& g) {
  Tensor& slot = grads[id];
  if (slot.empty()) {
    slot = Tensor(shape, g);
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) slot[i] += g[i];
}

std::vector<double> matmul_raw(const double* a, const double* b, std::size_t m, std::size_t k, std::size_t n) {
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * b[p * n + j];
    }
  }
  return out;
}

std::vector<double> transpose_raw(const double* a, std::size_t rows, std::size_t cols) {
  std::vector<double> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[c * rows + r] = a[r * cols + c];
  }
  return out;
}

}  // namespace

void Tape::backward(Var loss) {
  if (loss.tape_ != this) throw ValidationError("backward: loss belongs to a different tape");
  const Tensor& lv = node(loss.id()).value;
  if (lv.size() != 1) throw ValidationError("backward: loss must be a scalar, got shape " + shape_str(lv.shape()));

  grads_.assign(nodes_.size(), Tensor());
  grads_[loss.id()] = Tensor::full(lv.shape(), 1.0);

  for (std::size_t idx = loss.id() + 1; idx-- > 0;) {
    if (grads_[idx].empty()) continue;
    const Node& n = nodes_[idx];
    const std::vector<double>& g = grads_[idx].values();
    const Tensor& y = n.value;
    auto in = [&](std::size_t k) -> const Tensor& { return nodes_[n.inputs[k]].value; };
    auto push = [&](std::size_t k, const std::vector<double>& d) {
      accumulate(grads_, n.inputs[k], in(k).shape(), d);
    };
    auto unary = [&](auto&& local) {
      const Tensor& x = in(0);
      std::vector<double> d(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) d[i] = g[i] * local(x[i], y[i]);
      push(0, d);
    };

    switch (n.op) {
      case OpKind::kConstant:
      case OpKind::kVariable:
      case OpKind::kParameter:
        break;
      case OpKind::kMatMul: {
        const Tensor& a = in(0);
        const Tensor& b = in(1);
        const std::size_t m = a.rows(), k = a.cols(), cols = b.cols();
        const auto bt = transpose_raw(b.data().data(), k, cols);
        push(0, matmul_raw(g.data(), bt.data(), m, cols, k));
        const auto at = transpose_raw(a.data().data(), m, k);
        push(1, matmul_raw(at.data(), g.data(), k, m, cols));
        break;
      }
      case OpKind::kAdd:
        push(0, g);
        push(1, g);
        break;
      case OpKind::kSub: {
        std::vector<double> d(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = -g[i];
        push(0, g);
        push(1, d);
        break;
      }
      case OpKind::kMul: {
        const Tensor& a = in(0);
        const Tensor& b = in(1);
        std::vector<double> da(g.size()), db(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
          da[i] = g[i] * b[i];
          db[i] = g[i] * a[i];
        }
        push(0, da);
        push(1, db);
        break;
      }
      case OpKind::kDiv: {
        const Tensor& a = in(0);
        const Tensor& b = in(1);
        std::vector<double> da(g.size()), db(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
          da[i] = g[i] / b[i];
          db[i] = -g[i] * a[i] / (b[i] * b[i]);
        }
        push(0, da);
        push(1, db);
        break;
      }
      case OpKind::kAddRow: {
        const std::size_t rows = y.rows(), cols = y.cols();
        std::vector<double> dv(cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) dv[c] += g[r * cols + c];
        }
        push(0, g);
        push(1, dv);
        break;
      }
      case OpKind::kScale: {
        std::vector<double> d(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) d[i] = g[i] * n.scalar;
        push(0, d);
        break;
      }
      case OpKind::kShift:
        push(0, g);
        break;
      case OpKind::kTanh:
        unary([](double, double yv) { return 1.0 - yv * yv; });
        break;
      case OpKind::kExp:
        unary([](double, double yv) { return yv; });
        break;
      case OpKind::kLog:
        unary([](double xv, double) { return 1.0 / xv; });
        break;
      case OpKind::kSigmoid:
        unary([](double, double yv) { return yv * (1.0 - yv); });
        break;
      case OpKind::kSoftplus:
        unary([](double xv, double) { return numerics::sigmoid(xv); });
        break;
      case OpKind::kMish:
        unary([](double xv, double) { return mish_grad(xv); });
        break;
      case OpKind::kRelu:
        unary([](double xv, double) { return xv > 0.0 ? 1.0 : 0.0; });
        break;
      case OpKind::kSquare:
        unary([](double xv, double) { return 2.0 * xv; });
        break;
      case OpKind::kSqrt:
        unary([](double, double yv) { return 0.5 / yv; });
        break;
      case OpKind::kClampMin: {
        const double lo = n.scalar;
        unary([lo](double xv, double) { return xv > lo ? 1.0 : 0.0; });
        break;
      }
      case OpKind::kPow: {
        const double p = n.scalar;
        unary([p](double xv, double) { return p == 0.0 ? 0.0 : p * std::pow(xv, p - 1.0); });
        break;
      }
      case OpKind::kSoftmax: {
        std::vector<double> d(g.size());
        detail::for_each_lane(y.shape(), n.axis, [&](std::size_t start, std::size_t stride, std::size_t len) {
          double dot = 0.0;
          for (std::size_t i = 0; i < len; ++i) dot += g[start + i * stride] * y[start + i * stride];
          for (std::size_t i = 0; i < len; ++i) {
            const std::size_t at = start + i * stride;
            d[at] = y[at] * (g[at] - dot);
          }
        });
        push(0, d);
        break;
      }
      case OpKind::kLogSoftmax: {
        std::vector<double> d(g.size());
        detail::for_each_lane(y.shape(), n.axis, [&](std::size_t start, std::size_t stride, std::size_t len) {
          double total = 0.0;
          for (std::size_t i = 0; i < len; ++i) total += g[start + i * stride];
          for (std::size_t i = 0; i < len; ++i) {
            const std::size_t at = start + i * stride;
            d[at] = g[at] - std::exp(y[at]) * total;
          }
        });
        push(0, d);
        break;
      }
      case OpKind::kConcat: {
        std::size_t offset = 0;
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          const std::size_t len = in(k).size();
          push(k, std::vector<double>(g.begin() + offset, g.begin() + offset + len));
          offset += len;
        }
        break;
      }
      case OpKind::kStackRows: {
        const std::size_t cols = y.cols();
        for (std::size_t k = 0; k < n.inputs.size(); ++k) {
          push(k, std::vector<double>(g.begin() + k * cols, g.begin() + (k + 1) * cols));
        }
        break;
      }
      case OpKind::kMean: {
        const Tensor& x = in(0);
        std::vector<double> d(x.size());
        if (x.rank() == 1) {
          const double inv = 1.0 / static_cast<double>(x.size());
          for (auto& v : d) v = g[0] * inv;
        } else if (n.axis == 0) {
          const double inv = 1.0 / static_cast<double>(x.rows());
          for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < x.cols(); ++c) d[r * x.cols() + c] = g[c] * inv;
          }
        } else {
          const double inv = 1.0 / static_cast<double>(x.cols());
          for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < x.cols(); ++c) d[r * x.cols() + c] = g[r] * inv;
          }
        }
        push(0, d);
        break;
      }
      case OpKind::kSum:
        push(0, std::vector<double>(in(0).size(), g[0]));
        break;
      case OpKind::kWeightedSum: {
        const Tensor& w = in(0);
        const Tensor& h = in(1);
        const std::size_t steps = h.rows(), width = h.cols();
        std::vector<double> dw(steps, 0.0), dh(steps * width);
        for (std::size_t t = 0; t < steps; ++t) {
          for (std::size_t c = 0; c < width; ++c) {
            dw[t] += g[c] * h[t * width + c];
            dh[t * width + c] = w[t] * g[c];
          }
        }
        push(0, dw);
        push(1, dh);
        break;
      }
      case OpKind::kTranspose:
        push(0, transpose_raw(g.data(), y.rows(), y.cols()));
        break;
      case OpKind::kReshape:
        push(0, g);
        break;
      case OpKind::kPick: {
        const Tensor& x = in(0);
        std::vector<double> d(x.size(), 0.0);
        for (std::size_t r = 0; r < n.indices.size(); ++r) d[r * x.cols() + n.indices[r]] = g[r];
        push(0, d);
        break;
      }
    }
  }
}

void backward(Var loss, ParamStore& params) {
  Tape& tape = loss.tape();
  tape.backward(loss);
  const auto& bound = tape.bound_parameters();
  for (const std::string& name : params.names()) {
    auto it = bound.find(name);
    if (it == bound.end()) {
      params.set_grad(name, Tensor::zeros(params.value(name).shape()));
      continue;
    }
    const Tape::Node& node = tape.node(it->second);
    if (node.value.shape() != params.value(name).shape()) {
      throw ValidationError("parameter: bound tensor '" + name + "' shape " + shape_str(node.value.shape()) +
                            " differs from store shape " + shape_str(params.value(name).shape()));
    }
    params.set_grad(name, tape.grad_at(it->second));
  }
}

}  // namespace serlab::numerics
