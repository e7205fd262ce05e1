#pragma once

#include <cstddef>
#include <string>

#include "serlab/common/error.hpp"
#include "serlab/numerics/tensor.hpp"

namespace serlab::numerics::detail {

// Visits each 1-D lane of `x` along `axis`: lanes are described by their
// first element offset and the stride between consecutive elements.
template <typename Fn>
inline void for_each_lane(const Shape& shape, std::size_t axis, Fn&& fn) {
  if (shape.size() == 1) {
    if (axis != 0) throw ValidationError("axis " + std::to_string(axis) + " invalid for rank-1 tensor");
    fn(std::size_t{0}, std::size_t{1}, shape[0]);
    return;
  }
  if (shape.size() != 2 || axis > 1) {
    throw ValidationError("axis " + std::to_string(axis) + " invalid for shape " + shape_str(shape));
  }
  const std::size_t rows = shape[0];
  const std::size_t cols = shape[1];
  if (axis == 1) {
    for (std::size_t r = 0; r < rows; ++r) fn(r * cols, std::size_t{1}, cols);
  } else {
    for (std::size_t c = 0; c < cols; ++c) fn(c, cols, rows);
  }
}

}  // namespace serlab::numerics::detail
