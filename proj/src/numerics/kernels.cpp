#include "serlab/numerics/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "serlab/common/error.hpp"
#include "lanes.hpp"

namespace serlab::numerics {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double mish(double x) { return x * std::tanh(softplus(x)); }

double mish_grad(double x) {
  const double t = std::tanh(softplus(x));
  return t + x * sigmoid(x) * (1.0 - t * t);
}

void require_finite(const Tensor& x, const char* op, const char* what) {
  const std::size_t bad = x.first_non_finite();
  if (bad != x.size()) {
    throw NumericError(std::string(op) + ": non-finite " + what + " at index " + std::to_string(bad));
  }
}

namespace {

template <typename Fn>
Tensor map(const Tensor& x, const char* op, Fn&& fn) {
  require_finite(x, op);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fn(x[i]);
  return Tensor(x.shape(), std::move(out));
}

}  // namespace

Tensor softplus(const Tensor& x) { return map(x, "softplus", [](double v) { return softplus(v); }); }
Tensor mish(const Tensor& x) { return map(x, "mish", [](double v) { return mish(v); }); }
Tensor sigmoid(const Tensor& x) { return map(x, "sigmoid", [](double v) { return sigmoid(v); }); }

Tensor softmax(const Tensor& x, std::size_t axis) {
  require_finite(x, "softmax");
  std::vector<double> out(x.size());
  detail::for_each_lane(x.shape(), axis, [&](std::size_t start, std::size_t stride, std::size_t n) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, x[start + i * stride]);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(x[start + i * stride] - mx);
      out[start + i * stride] = e;
      total += e;
    }
    for (std::size_t i = 0; i < n; ++i) out[start + i * stride] /= total;
  });
  return Tensor(x.shape(), std::move(out));
}

Tensor log_softmax(const Tensor& x, std::size_t axis) {
  require_finite(x, "log_softmax");
  std::vector<double> out(x.size());
  detail::for_each_lane(x.shape(), axis, [&](std::size_t start, std::size_t stride, std::size_t n) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, x[start + i * stride]);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += std::exp(x[start + i * stride] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t i = 0; i < n; ++i) out[start + i * stride] = x[start + i * stride] - lse;
  });
  return Tensor(x.shape(), std::move(out));
}

}  // namespace serlab::numerics
