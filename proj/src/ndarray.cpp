#include "fingerloc/ndarray.hpp"

#include <algorithm>
#include <cstring>
#include <functional>
#include <numeric>

#include "fingerloc/error.hpp"

namespace fingerloc {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

NdArray::NdArray(Shape shape, double fill)
    : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

NdArray::NdArray(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_size(shape_)) {
    throw ShapeError("array of " + std::to_string(values_.size()) +
                     " values cannot have shape " + shape_to_string(shape_));
  }
}

void NdArray::reshape(Shape shape) {
  if (shape_size(shape) != values_.size()) {
    throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " +
                     shape_to_string(shape));
  }
  shape_ = std::move(shape);
}

void NdArray::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

Shape NdArray::sample_shape() const {
  if (shape_.empty()) return {};
  return Shape(shape_.begin() + 1, shape_.end());
}

std::size_t NdArray::sample_size() const {
  return shape_.empty() || shape_[0] == 0 ? shape_size(sample_shape())
                                          : values_.size() / shape_[0];
}

NdArray gather_rows(const NdArray& source, std::span<const std::size_t> rows) {
  Shape shape = source.shape();
  if (shape.empty()) throw ShapeError("gather_rows on a rank-0 array");
  const std::size_t stride = source.sample_size();
  shape[0] = rows.size();
  NdArray out(std::move(shape));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= source.extent(0)) throw ShapeError("gather_rows: row out of range");
    std::memcpy(out.data() + r * stride, source.data() + rows[r] * stride,
                stride * sizeof(double));
  }
  return out;
}

}  // namespace fingerloc
