#pragma once

#include <cstddef>

#include "serlab/numerics/tensor.hpp"

// Eager elementwise and reduction kernels. These are the forward
// definitions used by the autodiff tape; they can also be called directly.
namespace serlab::numerics {

double softplus(double x);
double sigmoid(double x);
double mish(double x);
// d/dx mish(x) = tanh(sp) + x * sigmoid(x) * (1 - tanh(sp)^2), sp = softplus(x).
double mish_grad(double x);

// Elementwise ln(1 + e^x) in the overflow-safe form max(x,0) + ln(1 + e^-|x|).
Tensor softplus(const Tensor& x);
// Elementwise x * tanh(softplus(x)).
Tensor mish(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// Normalizes along `axis` (0 or 1 for matrices, 0 for vectors), subtracting
// the running max first.
Tensor softmax(const Tensor& x, std::size_t axis);
Tensor log_softmax(const Tensor& x, std::size_t axis);

// Throws NumericError naming `op` and the first offending index.
void require_finite(const Tensor& x, const char* op, const char* what = "input");

}  // namespace serlab::numerics
