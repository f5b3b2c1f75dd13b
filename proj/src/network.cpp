#include "fingerloc/network.hpp"

#include <cmath>
#include <string>

#include "fingerloc/error.hpp"
#include "fingerloc/kernels.hpp"
#include "fingerloc/rng.hpp"

namespace fingerloc {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string describe(std::size_t index, const Layer& layer) {
  return "layer " + std::to_string(index) + " (" +
         std::string(layer_name(layer)) + ")";
}

// Output shape of `layer` for a per-sample input shape, or ShapeError.
Shape infer_shape(std::size_t index, const Layer& layer, const Shape& in) {
  return std::visit(
      Overloaded{
          [&](const Dense& l) -> Shape {
            if (in != Shape{l.in}) {
              throw ShapeError(describe(index, layer) + ": expected input " +
                               shape_to_string({l.in}) + ", got " +
                               shape_to_string(in));
            }
            return {l.out};
          },
          [&](const Conv2d& l) -> Shape {
            if (in.size() != 3 || in[0] != l.in_channels ||
                in[1] < l.kernel_h || in[2] < l.kernel_w) {
              throw ShapeError(describe(index, layer) +
                               ": cannot convolve input " + shape_to_string(in));
            }
            return {l.out_channels, in[1] - l.kernel_h + 1,
                    in[2] - l.kernel_w + 1};
          },
          [&](const MaxPool2d& l) -> Shape {
            if (in.size() != 3 || l.window == 0) {
              throw ShapeError(describe(index, layer) + ": cannot pool input " +
                               shape_to_string(in));
            }
            return {in[0], (in[1] + l.window - 1) / l.window,
                    (in[2] + l.window - 1) / l.window};
          },
          [&](const Flatten&) -> Shape { return {shape_size(in)}; },
          [&](const auto&) -> Shape { return in; },
      },
      layer);
}

Shape with_batch(std::size_t batch, const Shape& sample) {
  Shape s{batch};
  s.insert(s.end(), sample.begin(), sample.end());
  return s;
}

kernels::ConvDims conv_dims(const Conv2d& l, std::size_t batch, const Shape& in) {
  return {batch, l.in_channels, l.out_channels, in[1], in[2], l.kernel_h,
          l.kernel_w};
}

kernels::PoolDims pool_dims(const MaxPool2d& l, std::size_t batch,
                            const Shape& in) {
  return {batch, in[0], in[1], in[2], l.window};
}

}  // namespace

Layer make_dense(std::size_t in, std::size_t out) {
  return Dense{in, out, NdArray({out, in}), NdArray({out})};
}

Layer make_conv2d(std::size_t in_channels, std::size_t out_channels,
                  std::size_t kernel_h, std::size_t kernel_w) {
  return Conv2d{in_channels, out_channels, kernel_h, kernel_w,
                NdArray({out_channels, in_channels, kernel_h, kernel_w}),
                NdArray({out_channels})};
}

std::string_view layer_name(const Layer& layer) {
  return std::visit(Overloaded{
                        [](const Dense&) { return std::string_view("dense"); },
                        [](const Conv2d&) { return std::string_view("conv2d"); },
                        [](const MaxPool2d&) { return std::string_view("maxpool2d"); },
                        [](const Relu&) { return std::string_view("relu"); },
                        [](const Sigmoid&) { return std::string_view("sigmoid"); },
                        [](const Flatten&) { return std::string_view("flatten"); },
                    },
                    layer);
}

Network::Network(Shape input_shape)
    : input_shape_(input_shape), shapes_{std::move(input_shape)} {}

Network& Network::add(Layer layer) {
  const std::size_t index = layers_.size();
  Shape out = infer_shape(index, layer, shapes_.back());
  // Parameter arrays must match the declared extents.
  std::visit(Overloaded{
                 [&](Dense& l) {
                   if (l.weights.shape() != Shape{l.out, l.in}) l.weights = NdArray({l.out, l.in});
                   if (l.bias.shape() != Shape{l.out}) l.bias = NdArray({l.out});
                 },
                 [&](Conv2d& l) {
                   const Shape ws{l.out_channels, l.in_channels, l.kernel_h, l.kernel_w};
                   if (l.weights.shape() != ws) l.weights = NdArray(ws);
                   if (l.bias.shape() != Shape{l.out_channels}) l.bias = NdArray({l.out_channels});
                 },
                 [](auto&) {},
             },
             layer);
  layers_.push_back(std::move(layer));
  shapes_.push_back(std::move(out));
  return *this;
}

std::vector<NdArray*> Network::parameters() {
  std::vector<NdArray*> params;
  for (Layer& layer : layers_) {
    if (auto* d = std::get_if<Dense>(&layer)) {
      params.push_back(&d->weights);
      params.push_back(&d->bias);
    } else if (auto* c = std::get_if<Conv2d>(&layer)) {
      params.push_back(&c->weights);
      params.push_back(&c->bias);
    }
  }
  return params;
}

std::vector<const NdArray*> Network::parameters() const {
  std::vector<const NdArray*> params;
  for (NdArray* p : const_cast<Network*>(this)->parameters()) params.push_back(p);
  return params;
}

std::vector<NdArray> Network::zero_gradients() const {
  std::vector<NdArray> grads;
  for (const NdArray* p : parameters()) grads.emplace_back(p->shape());
  return grads;
}

void Network::initialize(std::uint64_t seed) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Rng rng(derive_seed(seed, "layer-init", i));
    auto fill = [&](NdArray& weights, NdArray& bias, double fan_in,
                    double fan_out) {
      const double limit = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& w : weights.values()) w = rng.uniform(-limit, limit);
      bias.fill(0.0);
    };
    if (auto* d = std::get_if<Dense>(&layers_[i])) {
      fill(d->weights, d->bias, static_cast<double>(d->in),
           static_cast<double>(d->out));
    } else if (auto* c = std::get_if<Conv2d>(&layers_[i])) {
      const double area = static_cast<double>(c->kernel_h * c->kernel_w);
      fill(c->weights, c->bias, area * static_cast<double>(c->in_channels),
           area * static_cast<double>(c->out_channels));
    }
  }
}

void Network::check_input(const NdArray& batch) const {
  if (batch.rank() != input_shape_.size() + 1 ||
      batch.sample_shape() != input_shape_) {
    const std::string where =
        layers_.empty() ? std::string("network input") : describe(0, layers_[0]);
    throw ShapeError(where + ": expected batch of " +
                     shape_to_string(input_shape_) + ", got " +
                     shape_to_string(batch.shape()));
  }
}

NdArray Network::forward(const NdArray& batch) const {
  std::vector<NdArray> trace = forward_trace(batch);
  return std::move(trace.back());
}

std::vector<NdArray> Network::forward_trace(const NdArray& batch) const {
  check_input(batch);
  const std::size_t n = batch.extent(0);
  std::vector<NdArray> trace;
  trace.reserve(layers_.size() + 1);
  trace.push_back(batch);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const NdArray& in = trace.back();
    NdArray out(with_batch(n, shapes_[i + 1]));
    std::visit(
        Overloaded{
            [&](const Dense& l) {
              kernels::parallel::dense_forward({n, l.in, l.out}, in.values(),
                                               l.weights.values(),
                                               l.bias.values(), out.values());
            },
            [&](const Conv2d& l) {
              kernels::parallel::conv2d_forward(conv_dims(l, n, shapes_[i]),
                                                in.values(), l.weights.values(),
                                                l.bias.values(), out.values());
            },
            [&](const MaxPool2d& l) {
              kernels::parallel::maxpool_forward(pool_dims(l, n, shapes_[i]),
                                                 in.values(), out.values());
            },
            [&](const Relu&) {
              kernels::parallel::relu_forward(in.values(), out.values());
            },
            [&](const Sigmoid&) {
              kernels::parallel::sigmoid_forward(in.values(), out.values());
            },
            [&](const Flatten&) {
              std::copy(in.values().begin(), in.values().end(),
                        out.values().begin());
            },
        },
        layers_[i]);
    trace.push_back(std::move(out));
  }
  return trace;
}

void Network::backward(const std::vector<NdArray>& trace,
                       const NdArray& grad_output,
                       std::vector<NdArray>& grads) const {
  if (trace.size() != layers_.size() + 1) {
    throw ShapeError("backward: trace does not belong to this network");
  }
  if (grad_output.shape() != trace.back().shape()) {
    throw ShapeError("backward: output gradient shape " +
                     shape_to_string(grad_output.shape()) + " != output " +
                     shape_to_string(trace.back().shape()));
  }
  if (grads.size() != parameters().size()) grads = zero_gradients();

  const std::size_t n = trace.front().extent(0);
  NdArray grad = grad_output;
  std::size_t param = grads.size();
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const NdArray& in = trace[i];
    const NdArray& out = trace[i + 1];
    // The network input never needs a gradient.
    const bool need_input_grad = i > 0;
    NdArray grad_in(need_input_grad ? in.shape() : Shape{0});
    std::span<double> gi =
        need_input_grad ? grad_in.values() : std::span<double>();
    std::visit(
        Overloaded{
            [&](const Dense& l) {
              param -= 2;
              kernels::parallel::dense_backward(
                  {n, l.in, l.out}, in.values(), l.weights.values(),
                  grad.values(), gi, grads[param].values(),
                  grads[param + 1].values());
            },
            [&](const Conv2d& l) {
              param -= 2;
              kernels::parallel::conv2d_backward(
                  conv_dims(l, n, shapes_[i]), in.values(), l.weights.values(),
                  grad.values(), gi, grads[param].values(),
                  grads[param + 1].values());
            },
            [&](const MaxPool2d& l) {
              if (need_input_grad)
                kernels::parallel::maxpool_backward(pool_dims(l, n, shapes_[i]),
                                                    in.values(), grad.values(), gi);
            },
            [&](const Relu&) {
              if (need_input_grad)
                kernels::parallel::relu_backward(in.values(), grad.values(), gi);
            },
            [&](const Sigmoid&) {
              if (need_input_grad)
                kernels::parallel::sigmoid_backward(out.values(), grad.values(), gi);
            },
            [&](const Flatten&) {
              if (need_input_grad)
                std::copy(grad.values().begin(), grad.values().end(), gi.begin());
            },
        },
        layers_[i]);
    if (!need_input_grad) break;
    grad = std::move(grad_in);
  }
}

std::size_t count_params(const Network& network) {
  std::size_t total = 0;
  for (const NdArray* p : network.parameters()) total += p->size();
  return total;
}

LossValue compute_loss(LossKind kind, const NdArray& prediction,
                       const NdArray& target) {
  if (prediction.shape() != target.shape()) {
    throw ShapeError("loss: prediction " + shape_to_string(prediction.shape()) +
                     " vs target " + shape_to_string(target.shape()));
  }
  const std::size_t count = prediction.size();
  LossValue loss{0.0, NdArray(prediction.shape())};
  if (count == 0) return loss;
  double sse = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = prediction[i] - target[i];
    sse += r * r;
  }
  const double mse = sse / static_cast<double>(count);
  if (kind == LossKind::kMse) {
    loss.value = mse;
    const double scale = 2.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i)
      loss.gradient[i] = scale * (prediction[i] - target[i]);
    return loss;
  }
  loss.value = std::sqrt(mse);
  if (loss.value > 0.0) {
    const double scale = 1.0 / (static_cast<double>(count) * loss.value);
    for (std::size_t i = 0; i < count; ++i)
      loss.gradient[i] = scale * (prediction[i] - target[i]);
  }
  return loss;
}

Gradients compute_gradients(const Network& network, const NdArray& input,
                            const NdArray& target, LossKind loss) {
  const std::vector<NdArray> trace = network.forward_trace(input);
  LossValue value = compute_loss(loss, trace.back(), target);
  Gradients result{value.value, network.zero_gradients()};
  network.backward(trace, value.gradient, result.parameters);
  return result;
}

}  // namespace fingerloc
