#pragma once

// Numeric kernels behind the network layers. Two implementations share one
// interface:
//
//   reference::  plain serial loops written straight from the definitions.
//                Kept for testing and benchmarking.
//   parallel::   OpenMP versions used by the library. Work is partitioned by
//                output element, so every sum is accumulated by one thread in
//                a fixed order and results do not depend on the thread count.
//
// Layouts: dense weights are [out][in]; convolution tensors are
// [batch][channel][row][col] and weights [out_ch][in_ch][kh][kw]. Convolution
// uses "valid" padding and unit stride. Max pooling uses stride == window and
// ceil-mode output extents (a partial edge window pools the cells it covers).

#include <cstddef>
#include <span>

namespace fingerloc::kernels {

struct DenseDims {
  std::size_t batch = 0;
  std::size_t in = 0;
  std::size_t out = 0;
};

struct ConvDims {
  std::size_t batch = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t in_h = 0;
  std::size_t in_w = 0;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;

  std::size_t out_h() const { return in_h - kernel_h + 1; }
  std::size_t out_w() const { return in_w - kernel_w + 1; }
};

struct PoolDims {
  std::size_t batch = 0;
  std::size_t channels = 0;
  std::size_t in_h = 0;
  std::size_t in_w = 0;
  std::size_t window = 1;

  std::size_t out_h() const { return (in_h + window - 1) / window; }
  std::size_t out_w() const { return (in_w + window - 1) / window; }
};

using In = std::span<const double>;
using Out = std::span<double>;

namespace reference {

void dense_forward(const DenseDims& d, In in, In weights, In bias, Out out);
// grad_in may be empty when the input gradient is not needed.
void dense_backward(const DenseDims& d, In in, In weights, In grad_out,
                    Out grad_in, Out grad_weights, Out grad_bias);
void conv2d_forward(const ConvDims& d, In in, In weights, In bias, Out out);
void conv2d_backward(const ConvDims& d, In in, In weights, In grad_out,
                     Out grad_in, Out grad_weights, Out grad_bias);
void maxpool_forward(const PoolDims& d, In in, Out out);
void maxpool_backward(const PoolDims& d, In in, In grad_out, Out grad_in);
void relu_forward(In in, Out out);
void relu_backward(In in, In grad_out, Out grad_in);
void sigmoid_forward(In in, Out out);
void sigmoid_backward(In out, In grad_out, Out grad_in);

}  // namespace reference

namespace parallel {

void dense_forward(const DenseDims& d, In in, In weights, In bias, Out out);
// grad_in may be empty when the input gradient is not needed.
void dense_backward(const DenseDims& d, In in, In weights, In grad_out,
                    Out grad_in, Out grad_weights, Out grad_bias);
void conv2d_forward(const ConvDims& d, In in, In weights, In bias, Out out);
void conv2d_backward(const ConvDims& d, In in, In weights, In grad_out,
                     Out grad_in, Out grad_weights, Out grad_bias);
void maxpool_forward(const PoolDims& d, In in, Out out);
void maxpool_backward(const PoolDims& d, In in, In grad_out, Out grad_in);
void relu_forward(In in, Out out);
void relu_backward(In in, In grad_out, Out grad_in);
void sigmoid_forward(In in, Out out);
void sigmoid_backward(In out, In grad_out, Out grad_in);

}  // namespace parallel

}  // namespace fingerloc::kernels
