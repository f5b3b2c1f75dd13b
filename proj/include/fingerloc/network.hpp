#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "fingerloc/ndarray.hpp"

namespace fingerloc {

// Fully connected layer. Per-sample input [in], output [out].
struct Dense {
  std::size_t in = 0;
  std::size_t out = 0;
  NdArray weights;  // [out, in]
  NdArray bias;     // [out]

  bool operator==(const Dense&) const = default;
};

// Valid-padding, unit-stride 2-d convolution on [channels, rows, cols].
struct Conv2d {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  NdArray weights;  // [out_channels, in_channels, kernel_h, kernel_w]
  NdArray bias;     // [out_channels]

  bool operator==(const Conv2d&) const = default;
};

// Non-overlapping max pooling, ceil-mode extents.
struct MaxPool2d {
  std::size_t window = 2;

  bool operator==(const MaxPool2d&) const = default;
};

struct Relu {
  bool operator==(const Relu&) const = default;
};
struct Sigmoid {
  bool operator==(const Sigmoid&) const = default;
};
struct Flatten {
  bool operator==(const Flatten&) const = default;
};

using Layer = std::variant<Dense, Conv2d, MaxPool2d, Relu, Sigmoid, Flatten>;

Layer make_dense(std::size_t in, std::size_t out);
Layer make_conv2d(std::size_t in_channels, std::size_t out_channels,
                  std::size_t kernel_h, std::size_t kernel_w);

std::string_view layer_name(const Layer& layer);

// Sequential network. Shapes are validated when layers are added; arrays
// passed to forward() carry a leading batch axis.
//
// A Network is a plain value: forward/backward are const and safe to call from
// many threads at once. Parameters change only through parameters().
class Network {
 public:
  Network() = default;
  explicit Network(Shape input_shape);

  // Appends a layer. Throws ShapeError if it cannot consume the current
  // output shape. Parameter arrays are sized here and zero-filled.
  Network& add(Layer layer);

  const Shape& input_shape() const { return input_shape_; }
  const Shape& output_shape() const { return shapes_.back(); }
  const std::vector<Layer>& layers() const { return layers_; }
  // Per-sample input shape of layer i; entry layers().size() is the output.
  const Shape& shape_at(std::size_t i) const { return shapes_.at(i); }

  // Trainable arrays in layer order, weights before bias.
  std::vector<NdArray*> parameters();
  std::vector<const NdArray*> parameters() const;
  std::vector<NdArray> zero_gradients() const;

  // Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
  void initialize(std::uint64_t seed);

  NdArray forward(const NdArray& batch) const;

  // Forward pass keeping every activation: trace[0] is the input and
  // trace[i + 1] the output of layer i.
  std::vector<NdArray> forward_trace(const NdArray& batch) const;

  // Back-propagates grad_output through the trace. Writes one gradient per
  // parameter into grads (same order as parameters()).
  void backward(const std::vector<NdArray>& trace, const NdArray& grad_output,
                std::vector<NdArray>& grads) const;

  bool operator==(const Network&) const = default;

 private:
  void check_input(const NdArray& batch) const;

  Shape input_shape_;
  std::vector<Layer> layers_;
  std::vector<Shape> shapes_{Shape{}};
};

std::size_t count_params(const Network& network);

enum class LossKind { kRmse, kMse };

struct LossValue {
  double value = 0.0;
  NdArray gradient;  // d value / d prediction
};

// kRmse: sqrt(mean over all batch elements of squared error). The gradient at
// zero loss is defined as zero. kMse: the mean itself.
LossValue compute_loss(LossKind kind, const NdArray& prediction,
                       const NdArray& target);

struct Gradients {
  double loss = 0.0;
  std::vector<NdArray> parameters;
};

Gradients compute_gradients(const Network& network, const NdArray& input,
                            const NdArray& target, LossKind loss);

}  // namespace fingerloc
