#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fingerloc {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

// Dense row-major array of doubles.
class NdArray {
 public:
  NdArray() = default;
  explicit NdArray(Shape shape, double fill = 0.0);
  NdArray(Shape shape, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  // Same values, new extents. Throws ShapeError if the element count differs.
  void reshape(Shape shape);
  void fill(double value);

  // Extents after the leading (batch) axis.
  Shape sample_shape() const;
  std::size_t sample_size() const;

  friend bool operator==(const NdArray&, const NdArray&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

// Copies the selected leading-axis rows into a new array.
NdArray gather_rows(const NdArray& source, std::span<const std::size_t> rows);

}  // namespace fingerloc
