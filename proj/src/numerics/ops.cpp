// Forward definitions of the closed op set. Gradients live in
// Tape::backward (autodiff.cpp).

#include <cmath>

#include "lanes.hpp"
#include "serlab/common/error.hpp"
#include "serlab/numerics/autodiff.hpp"
#include "serlab/numerics/kernels.hpp"

namespace serlab::numerics {
namespace {

Tape& same_tape(Var a, Var b, const char* op) {
  if (!a.valid() || !b.valid()) throw ValidationError(std::string(op) + ": unbound operand");
  if (&a.tape() != &b.tape()) throw ValidationError(std::string(op) + ": operands on different tapes");
  return a.tape();
}

void require_same_shape(Var a, Var b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ValidationError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                          shape_str(b.shape()));
  }
}

template <typename Fn>
Var binary(Var a, Var b, OpKind op, Fn&& fn) {
  Tape& tape = same_tape(a, b, op_name(op));
  require_same_shape(a, b, op_name(op));
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i], y[i]);
  return tape.record({op, Tensor(x.shape(), std::move(out)), {a.id(), b.id()}});
}

template <typename Fn>
Var unary(Var a, OpKind op, Fn&& fn, double scalar = 0.0) {
  if (!a.valid()) throw ValidationError(std::string(op_name(op)) + ": unbound operand");
  const Tensor& x = a.value();
  require_finite(x, op_name(op));
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i]);
  Tape::Node n{op, Tensor(x.shape(), std::move(out)), {a.id()}};
  n.scalar = scalar;
  return a.tape().record(std::move(n));
}

void require_rank(Var a, std::size_t rank, const char* op) {
  if (a.value().rank() != rank) {
    throw ValidationError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                          shape_str(a.shape()));
  }
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& tape = same_tape(a, b, "matmul");
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  if (x.cols() != y.rows()) {
    throw ValidationError("matmul: shape mismatch " + shape_str(x.shape()) + " x " + shape_str(y.shape()));
  }
  const std::size_t m = x.rows(), k = x.cols(), n = y.cols();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double xv = x[i * k + p];
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += xv * y[p * n + j];
    }
  }
  return tape.record({OpKind::kMatMul, Tensor::matrix(m, n, std::move(out)), {a.id(), b.id()}});
}

Var add(Var a, Var b) { return binary(a, b, OpKind::kAdd, [](double x, double y) { return x + y; }); }
Var sub(Var a, Var b) { return binary(a, b, OpKind::kSub, [](double x, double y) { return x - y; }); }
Var mul(Var a, Var b) { return binary(a, b, OpKind::kMul, [](double x, double y) { return x * y; }); }
Var div(Var a, Var b) { return binary(a, b, OpKind::kDiv, [](double x, double y) { return x / y; }); }

Var add_row(Var m, Var row) {
  Tape& tape = same_tape(m, row, "add_row");
  require_rank(m, 2, "add_row");
  require_rank(row, 1, "add_row");
  const Tensor& x = m.value();
  const Tensor& v = row.value();
  if (v.size() != x.cols()) {
    throw ValidationError("add_row: shape mismatch " + shape_str(x.shape()) + " + " + shape_str(v.shape()));
  }
  std::vector<double> out(x.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out[r * x.cols() + c] = x[r * x.cols() + c] + v[c];
  }
  return tape.record({OpKind::kAddRow, Tensor(x.shape(), std::move(out)), {m.id(), row.id()}});
}

Var scale(Var a, double factor) {
  return unary(a, OpKind::kScale, [factor](double x) { return x * factor; }, factor);
}

Var shift(Var a, double offset) {
  return unary(a, OpKind::kShift, [offset](double x) { return x + offset; }, offset);
}

Var tanh(Var a) { return unary(a, OpKind::kTanh, [](double x) { return std::tanh(x); }); }
Var exp(Var a) { return unary(a, OpKind::kExp, [](double x) { return std::exp(x); }); }
Var log(Var a) { return unary(a, OpKind::kLog, [](double x) { return std::log(x); }); }
Var sigmoid(Var a) { return unary(a, OpKind::kSigmoid, [](double x) { return numerics::sigmoid(x); }); }
Var softplus(Var a) { return unary(a, OpKind::kSoftplus, [](double x) { return numerics::softplus(x); }); }
Var mish(Var a) { return unary(a, OpKind::kMish, [](double x) { return numerics::mish(x); }); }
Var relu(Var a) { return unary(a, OpKind::kRelu, [](double x) { return x > 0.0 ? x : 0.0; }); }
Var square(Var a) { return unary(a, OpKind::kSquare, [](double x) { return x * x; }); }
Var sqrt(Var a) { return unary(a, OpKind::kSqrt, [](double x) { return std::sqrt(x); }); }

Var clamp_min(Var a, double lo) {
  return unary(a, OpKind::kClampMin, [lo](double x) { return x > lo ? x : lo; }, lo);
}

Var pow(Var a, double exponent) {
  return unary(a, OpKind::kPow, [exponent](double x) { return std::pow(x, exponent); }, exponent);
}

Var softmax(Var a, std::size_t axis) {
  if (!a.valid()) throw ValidationError("softmax: unbound operand");
  Tape::Node n{OpKind::kSoftmax, numerics::softmax(a.value(), axis), {a.id()}};
  n.axis = axis;
  return a.tape().record(std::move(n));
}

Var log_softmax(Var a, std::size_t axis) {
  if (!a.valid()) throw ValidationError("log_softmax: unbound operand");
  Tape::Node n{OpKind::kLogSoftmax, numerics::log_softmax(a.value(), axis), {a.id()}};
  n.axis = axis;
  return a.tape().record(std::move(n));
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw ValidationError("concat: no operands");
  std::vector<double> out;
  std::vector<std::size_t> ids;
  for (const Var& p : parts) {
    same_tape(parts.front(), p, "concat");
    require_rank(p, 1, "concat");
    const auto d = p.value().data();
    out.insert(out.end(), d.begin(), d.end());
    ids.push_back(p.id());
  }
  return parts.front().tape().record({OpKind::kConcat, Tensor::vector(std::move(out)), std::move(ids)});
}

Var stack_rows(std::span<const Var> rows) {
  if (rows.empty()) throw ValidationError("stack_rows: no operands");
  const std::size_t cols = rows.front().value().size();
  std::vector<double> out;
  out.reserve(rows.size() * cols);
  std::vector<std::size_t> ids;
  for (const Var& r : rows) {
    same_tape(rows.front(), r, "stack_rows");
    require_rank(r, 1, "stack_rows");
    if (r.value().size() != cols) {
      throw ValidationError("stack_rows: row length " + std::to_string(r.value().size()) + " != " +
                            std::to_string(cols));
    }
    const auto d = r.value().data();
    out.insert(out.end(), d.begin(), d.end());
    ids.push_back(r.id());
  }
  return rows.front().tape().record(
      {OpKind::kStackRows, Tensor::matrix(rows.size(), cols, std::move(out)), std::move(ids)});
}

Var mean(Var a, std::size_t axis) {
  if (!a.valid()) throw ValidationError("mean: unbound operand");
  const Tensor& x = a.value();
  Tensor out;
  if (x.rank() == 1) {
    if (axis != 0) throw ValidationError("mean: axis " + std::to_string(axis) + " invalid for rank-1 tensor");
    double total = 0.0;
    for (double v : x.data()) total += v;
    out = Tensor::scalar(total * (1.0 / static_cast<double>(x.size())));
  } else if (x.rank() == 2 && axis == 0) {
    std::vector<double> acc(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) acc[c] += x[r * x.cols() + c];
    }
    const double inv = 1.0 / static_cast<double>(x.rows());
    for (double& v : acc) v *= inv;
    out = Tensor::vector(std::move(acc));
  } else if (x.rank() == 2 && axis == 1) {
    std::vector<double> acc(x.rows(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      for (std::size_t c = 0; c < x.cols(); ++c) acc[r] += x[r * x.cols() + c];
    }
    const double inv = 1.0 / static_cast<double>(x.cols());
    for (double& v : acc) v *= inv;
    out = Tensor::vector(std::move(acc));
  } else {
    throw ValidationError("mean: axis " + std::to_string(axis) + " invalid for shape " + shape_str(x.shape()));
  }
  Tape::Node n{OpKind::kMean, std::move(out), {a.id()}};
  n.axis = axis;
  return a.tape().record(std::move(n));
}

Var sum(Var a) {
  if (!a.valid()) throw ValidationError("sum: unbound operand");
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  return a.tape().record({OpKind::kSum, Tensor::scalar(total), {a.id()}});
}

Var weighted_sum(Var weights, Var rows) {
  Tape& tape = same_tape(weights, rows, "weighted_sum");
  require_rank(weights, 1, "weighted_sum");
  require_rank(rows, 2, "weighted_sum");
  const Tensor& w = weights.value();
  const Tensor& h = rows.value();
  if (w.size() != h.rows()) {
    throw ValidationError("weighted_sum: shape mismatch " + shape_str(w.shape()) + " vs " + shape_str(h.shape()));
  }
  std::vector<double> out(h.cols(), 0.0);
  for (std::size_t t = 0; t < h.rows(); ++t) {
    for (std::size_t c = 0; c < h.cols(); ++c) out[c] += w[t] * h[t * h.cols() + c];
  }
  return tape.record({OpKind::kWeightedSum, Tensor::vector(std::move(out)), {weights.id(), rows.id()}});
}

Var transpose(Var a) {
  if (!a.valid()) throw ValidationError("transpose: unbound operand");
  require_rank(a, 2, "transpose");
  const Tensor& x = a.value();
  std::vector<double> out(x.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out[c * x.rows() + r] = x[r * x.cols() + c];
  }
  return a.tape().record({OpKind::kTranspose, Tensor::matrix(x.cols(), x.rows(), std::move(out)), {a.id()}});
}

Var reshape(Var a, Shape shape) {
  if (!a.valid()) throw ValidationError("reshape: unbound operand");
  if (shape_size(shape) != a.value().size()) {
    throw ValidationError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  }
  return a.tape().record({OpKind::kReshape, Tensor(std::move(shape), a.value().values()), {a.id()}});
}

Var pick(Var a, std::span<const std::size_t> columns) {
  if (!a.valid()) throw ValidationError("pick: unbound operand");
  require_rank(a, 2, "pick");
  const Tensor& x = a.value();
  if (columns.size() != x.rows()) {
    throw ValidationError("pick: " + std::to_string(columns.size()) + " indices for " + std::to_string(x.rows()) +
                          " rows");
  }
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    if (columns[r] >= x.cols()) {
      throw ValidationError("pick: index " + std::to_string(columns[r]) + " out of range for " +
                            std::to_string(x.cols()) + " columns");
    }
    out[r] = x[r * x.cols() + columns[r]];
  }
  Tape::Node n{OpKind::kPick, Tensor::vector(std::move(out)), {a.id()}};
  n.indices.assign(columns.begin(), columns.end());
  return a.tape().record(std::move(n));
}

}  // namespace serlab::numerics
