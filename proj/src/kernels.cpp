#include "fingerloc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fingerloc::kernels {
namespace {

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kMinParallelWork = 1 << 15;

inline double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace

// ---------------------------------------------------------------------------
// reference

namespace reference {

void dense_forward(const DenseDims& d, In in, In weights, In bias, Out out) {
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t o = 0; o < d.out; ++o) {
      double acc = 0.0;
      for (std::size_t i = 0; i < d.in; ++i) {
        acc += weights[o * d.in + i] * in[n * d.in + i];
      }
      out[n * d.out + o] = acc + bias[o];
    }
  }
}

void dense_backward(const DenseDims& d, In in, In weights, In grad_out,
                    Out grad_in, Out grad_weights, Out grad_bias) {
  for (std::size_t o = 0; o < d.out; ++o) {
    double gb = 0.0;
    for (std::size_t n = 0; n < d.batch; ++n) gb += grad_out[n * d.out + o];
    grad_bias[o] = gb;
    for (std::size_t i = 0; i < d.in; ++i) {
      double gw = 0.0;
      for (std::size_t n = 0; n < d.batch; ++n) {
        gw += grad_out[n * d.out + o] * in[n * d.in + i];
      }
      grad_weights[o * d.in + i] = gw;
    }
  }
  if (grad_in.empty()) return;
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t i = 0; i < d.in; ++i) {
      double gi = 0.0;
      for (std::size_t o = 0; o < d.out; ++o) {
        gi += grad_out[n * d.out + o] * weights[o * d.in + i];
      }
      grad_in[n * d.in + i] = gi;
    }
  }
}

void conv2d_forward(const ConvDims& d, In in, In weights, In bias, Out out) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t oc = 0; oc < d.out_channels; ++oc) {
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
          double acc = 0.0;
          for (std::size_t ic = 0; ic < d.in_channels; ++ic) {
            for (std::size_t ky = 0; ky < d.kernel_h; ++ky) {
              for (std::size_t kx = 0; kx < d.kernel_w; ++kx) {
                const double w =
                    weights[((oc * d.in_channels + ic) * d.kernel_h + ky) *
                                d.kernel_w + kx];
                const double v =
                    in[((n * d.in_channels + ic) * d.in_h + y + ky) * d.in_w +
                       x + kx];
                acc += w * v;
              }
            }
          }
          out[((n * d.out_channels + oc) * oh + y) * ow + x] = acc + bias[oc];
        }
      }
    }
  }
}

void conv2d_backward(const ConvDims& d, In in, In weights, In grad_out,
                     Out grad_in, Out grad_weights, Out grad_bias) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  auto g = [&](std::size_t n, std::size_t oc, std::size_t y, std::size_t x) {
    return grad_out[((n * d.out_channels + oc) * oh + y) * ow + x];
  };
  for (std::size_t oc = 0; oc < d.out_channels; ++oc) {
    double gb = 0.0;
    for (std::size_t n = 0; n < d.batch; ++n)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x) gb += g(n, oc, y, x);
    grad_bias[oc] = gb;
    for (std::size_t ic = 0; ic < d.in_channels; ++ic) {
      for (std::size_t ky = 0; ky < d.kernel_h; ++ky) {
        for (std::size_t kx = 0; kx < d.kernel_w; ++kx) {
          double gw = 0.0;
          for (std::size_t n = 0; n < d.batch; ++n)
            for (std::size_t y = 0; y < oh; ++y)
              for (std::size_t x = 0; x < ow; ++x)
                gw += g(n, oc, y, x) *
                      in[((n * d.in_channels + ic) * d.in_h + y + ky) * d.in_w +
                         x + kx];
          grad_weights[((oc * d.in_channels + ic) * d.kernel_h + ky) *
                           d.kernel_w + kx] = gw;
        }
      }
    }
  }
  if (grad_in.empty()) return;
  for (std::size_t n = 0; n < d.batch; ++n) {
    for (std::size_t ic = 0; ic < d.in_channels; ++ic) {
      for (std::size_t iy = 0; iy < d.in_h; ++iy) {
        for (std::size_t ix = 0; ix < d.in_w; ++ix) {
          double gi = 0.0;
          for (std::size_t oc = 0; oc < d.out_channels; ++oc) {
            for (std::size_t ky = 0; ky < d.kernel_h; ++ky) {
              if (iy < ky || iy - ky >= oh) continue;
              for (std::size_t kx = 0; kx < d.kernel_w; ++kx) {
                if (ix < kx || ix - kx >= ow) continue;
                gi += g(n, oc, iy - ky, ix - kx) *
                      weights[((oc * d.in_channels + ic) * d.kernel_h + ky) *
                                  d.kernel_w + kx];
              }
            }
          }
          grad_in[((n * d.in_channels + ic) * d.in_h + iy) * d.in_w + ix] = gi;
        }
      }
    }
  }
}

void maxpool_forward(const PoolDims& d, In in, Out out) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  for (std::size_t p = 0; p < d.batch * d.channels; ++p) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t wy = y * d.window; wy < std::min(d.in_h, (y + 1) * d.window); ++wy)
          for (std::size_t wx = x * d.window; wx < std::min(d.in_w, (x + 1) * d.window); ++wx)
            best = std::max(best, in[(p * d.in_h + wy) * d.in_w + wx]);
        out[(p * oh + y) * ow + x] = best;
      }
    }
  }
}

void maxpool_backward(const PoolDims& d, In in, In grad_out, Out grad_in) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  std::fill(grad_in.begin(), grad_in.end(), 0.0);
  for (std::size_t p = 0; p < d.batch * d.channels; ++p) {
    for (std::size_t y = 0; y < oh; ++y) {
      for (std::size_t x = 0; x < ow; ++x) {
        // First maximum in row-major window order receives the gradient.
        std::size_t arg = (p * d.in_h + y * d.window) * d.in_w + x * d.window;
        for (std::size_t wy = y * d.window; wy < std::min(d.in_h, (y + 1) * d.window); ++wy)
          for (std::size_t wx = x * d.window; wx < std::min(d.in_w, (x + 1) * d.window); ++wx) {
            const std::size_t k = (p * d.in_h + wy) * d.in_w + wx;
            if (in[k] > in[arg]) arg = k;
          }
        grad_in[arg] += grad_out[(p * oh + y) * ow + x];
      }
    }
  }
}

void relu_forward(In in, Out out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void relu_backward(In in, In grad_out, Out grad_in) {
  for (std::size_t i = 0; i < in.size(); ++i)
    grad_in[i] = in[i] > 0.0 ? grad_out[i] : 0.0;
}

void sigmoid_forward(In in, Out out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = sigmoid(in[i]);
}

void sigmoid_backward(In out, In grad_out, Out grad_in) {
  for (std::size_t i = 0; i < out.size(); ++i)
    grad_in[i] = grad_out[i] * out[i] * (1.0 - out[i]);
}

}  // namespace reference

// ---------------------------------------------------------------------------
// parallel

namespace parallel {

void dense_forward(const DenseDims& d, In in, In weights, In bias, Out out) {
  const std::ptrdiff_t items = static_cast<std::ptrdiff_t>(d.batch * d.out);
  const bool big = d.batch * d.out * d.in >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t k = 0; k < items; ++k) {
    const std::size_t n = static_cast<std::size_t>(k) / d.out;
    const std::size_t o = static_cast<std::size_t>(k) % d.out;
    const double* w = weights.data() + o * d.in;
    const double* x = in.data() + n * d.in;
    double acc = 0.0;
    for (std::size_t i = 0; i < d.in; ++i) acc += w[i] * x[i];
    out[k] = acc + bias[o];
  }
}

void dense_backward(const DenseDims& d, In in, In weights, In grad_out,
                    Out grad_in, Out grad_weights, Out grad_bias) {
  const bool big = d.batch * d.out * d.in >= kMinParallelWork;
  const std::ptrdiff_t outs = static_cast<std::ptrdiff_t>(d.out);
#pragma omp parallel if (big)
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t o = 0; o < outs; ++o) {
      double* gw = grad_weights.data() + o * d.in;
      std::fill(gw, gw + d.in, 0.0);
      double gb = 0.0;
      for (std::size_t n = 0; n < d.batch; ++n) {
        const double g = grad_out[n * d.out + o];
        const double* x = in.data() + n * d.in;
        gb += g;
        for (std::size_t i = 0; i < d.in; ++i) gw[i] += g * x[i];
      }
      grad_bias[o] = gb;
    }
    if (!grad_in.empty()) {
      const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(d.batch);
#pragma omp for schedule(static)
      for (std::ptrdiff_t n = 0; n < rows; ++n) {
        double* gi = grad_in.data() + n * d.in;
        std::fill(gi, gi + d.in, 0.0);
        for (std::size_t o = 0; o < d.out; ++o) {
          const double g = grad_out[n * d.out + o];
          const double* w = weights.data() + o * d.in;
          for (std::size_t i = 0; i < d.in; ++i) gi[i] += g * w[i];
        }
      }
    }
  }
}

void conv2d_forward(const ConvDims& d, In in, In weights, In bias, Out out) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  const std::size_t plane_in = d.in_h * d.in_w;
  const std::size_t kernel = d.in_channels * d.kernel_h * d.kernel_w;
  const std::ptrdiff_t items = static_cast<std::ptrdiff_t>(d.batch * d.out_channels);
  const bool big = d.batch * d.out_channels * oh * ow * kernel >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t k = 0; k < items; ++k) {
    const std::size_t n = static_cast<std::size_t>(k) / d.out_channels;
    const std::size_t oc = static_cast<std::size_t>(k) % d.out_channels;
    double* dst = out.data() + static_cast<std::size_t>(k) * oh * ow;
    std::fill(dst, dst + oh * ow, 0.0);
    for (std::size_t ic = 0; ic < d.in_channels; ++ic) {
      const double* src = in.data() + (n * d.in_channels + ic) * plane_in;
      const double* w = weights.data() + (oc * d.in_channels + ic) * d.kernel_h * d.kernel_w;
      for (std::size_t ky = 0; ky < d.kernel_h; ++ky) {
        for (std::size_t kx = 0; kx < d.kernel_w; ++kx) {
          const double wv = w[ky * d.kernel_w + kx];
          for (std::size_t y = 0; y < oh; ++y) {
            const double* row = src + (y + ky) * d.in_w + kx;
            double* o = dst + y * ow;
            for (std::size_t x = 0; x < ow; ++x) o[x] += wv * row[x];
          }
        }
      }
    }
    const double b = bias[oc];
    for (std::size_t i = 0; i < oh * ow; ++i) dst[i] += b;
  }
}

void conv2d_backward(const ConvDims& d, In in, In weights, In grad_out,
                     Out grad_in, Out grad_weights, Out grad_bias) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  const std::size_t plane_in = d.in_h * d.in_w;
  const std::size_t plane_out = oh * ow;
  const std::size_t kk = d.kernel_h * d.kernel_w;
  const bool big =
      d.batch * d.out_channels * plane_out * d.in_channels * kk >= kMinParallelWork;
  const std::ptrdiff_t pairs =
      static_cast<std::ptrdiff_t>(d.out_channels * d.in_channels);
#pragma omp parallel if (big)
  {
#pragma omp for schedule(static)
    for (std::ptrdiff_t oc = 0; oc < static_cast<std::ptrdiff_t>(d.out_channels); ++oc) {
      double gb = 0.0;
      for (std::size_t n = 0; n < d.batch; ++n) {
        const double* g = grad_out.data() + (n * d.out_channels + oc) * plane_out;
        for (std::size_t i = 0; i < plane_out; ++i) gb += g[i];
      }
      grad_bias[oc] = gb;
    }
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < pairs; ++k) {
      const std::size_t oc = static_cast<std::size_t>(k) / d.in_channels;
      const std::size_t ic = static_cast<std::size_t>(k) % d.in_channels;
      double* gw = grad_weights.data() + static_cast<std::size_t>(k) * kk;
      for (std::size_t ky = 0; ky < d.kernel_h; ++ky) {
        for (std::size_t kx = 0; kx < d.kernel_w; ++kx) {
          double acc = 0.0;
          for (std::size_t n = 0; n < d.batch; ++n) {
            const double* g = grad_out.data() + (n * d.out_channels + oc) * plane_out;
            const double* src = in.data() + (n * d.in_channels + ic) * plane_in;
            for (std::size_t y = 0; y < oh; ++y) {
              const double* row = src + (y + ky) * d.in_w + kx;
              const double* gr = g + y * ow;
              for (std::size_t x = 0; x < ow; ++x) acc += gr[x] * row[x];
            }
          }
          gw[ky * d.kernel_w + kx] = acc;
        }
      }
    }
    if (!grad_in.empty()) {
      const std::ptrdiff_t planes = static_cast<std::ptrdiff_t>(d.batch * d.in_channels);
#pragma omp for schedule(static)
      for (std::ptrdiff_t k = 0; k < planes; ++k) {
        const std::size_t n = static_cast<std::size_t>(k) / d.in_channels;
        const std::size_t ic = static_cast<std::size_t>(k) % d.in_channels;
        double* gi = grad_in.data() + static_cast<std::size_t>(k) * plane_in;
        std::fill(gi, gi + plane_in, 0.0);
        for (std::size_t oc = 0; oc < d.out_channels; ++oc) {
          const double* g = grad_out.data() + (n * d.out_channels + oc) * plane_out;
          const double* w = weights.data() + (oc * d.in_channels + ic) * kk;
          for (std::size_t ky = 0; ky < d.kernel_h; ++ky) {
            for (std::size_t kx = 0; kx < d.kernel_w; ++kx) {
              const double wv = w[ky * d.kernel_w + kx];
              for (std::size_t y = 0; y < oh; ++y) {
                double* row = gi + (y + ky) * d.in_w + kx;
                const double* gr = g + y * ow;
                for (std::size_t x = 0; x < ow; ++x) row[x] += wv * gr[x];
              }
            }
          }
        }
      }
    }
  }
}

void maxpool_forward(const PoolDims& d, In in, Out out) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  const std::ptrdiff_t planes = static_cast<std::ptrdiff_t>(d.batch * d.channels);
  const bool big = d.batch * d.channels * d.in_h * d.in_w >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t p = 0; p < planes; ++p) {
    const double* src = in.data() + p * d.in_h * d.in_w;
    double* dst = out.data() + p * oh * ow;
    for (std::size_t y = 0; y < oh; ++y) {
      const std::size_t y_end = std::min(d.in_h, (y + 1) * d.window);
      for (std::size_t x = 0; x < ow; ++x) {
        const std::size_t x_end = std::min(d.in_w, (x + 1) * d.window);
        double best = src[y * d.window * d.in_w + x * d.window];
        for (std::size_t wy = y * d.window; wy < y_end; ++wy)
          for (std::size_t wx = x * d.window; wx < x_end; ++wx)
            best = std::max(best, src[wy * d.in_w + wx]);
        dst[y * ow + x] = best;
      }
    }
  }
}

void maxpool_backward(const PoolDims& d, In in, In grad_out, Out grad_in) {
  const std::size_t oh = d.out_h(), ow = d.out_w();
  const std::ptrdiff_t planes = static_cast<std::ptrdiff_t>(d.batch * d.channels);
  const bool big = d.batch * d.channels * d.in_h * d.in_w >= kMinParallelWork;
#pragma omp parallel for schedule(static) if (big)
  for (std::ptrdiff_t p = 0; p < planes; ++p) {
    const double* src = in.data() + p * d.in_h * d.in_w;
    const double* g = grad_out.data() + p * oh * ow;
    double* dst = grad_in.data() + p * d.in_h * d.in_w;
    std::fill(dst, dst + d.in_h * d.in_w, 0.0);
    for (std::size_t y = 0; y < oh; ++y) {
      const std::size_t y_end = std::min(d.in_h, (y + 1) * d.window);
      for (std::size_t x = 0; x < ow; ++x) {
        const std::size_t x_end = std::min(d.in_w, (x + 1) * d.window);
        std::size_t arg = y * d.window * d.in_w + x * d.window;
        for (std::size_t wy = y * d.window; wy < y_end; ++wy)
          for (std::size_t wx = x * d.window; wx < x_end; ++wx)
            if (src[wy * d.in_w + wx] > src[arg]) arg = wy * d.in_w + wx;
        dst[arg] += g[y * ow + x];
      }
    }
  }
}

void relu_forward(In in, Out out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for simd schedule(static) if (in.size() >= kMinParallelWork)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void relu_backward(In in, In grad_out, Out grad_in) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for simd schedule(static) if (in.size() >= kMinParallelWork)
  for (std::ptrdiff_t i = 0; i < n; ++i) grad_in[i] = in[i] > 0.0 ? grad_out[i] : 0.0;
}

void sigmoid_forward(In in, Out out) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static) if (in.size() >= kMinParallelWork)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = sigmoid(in[i]);
}

void sigmoid_backward(In out, In grad_out, Out grad_in) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for simd schedule(static) if (out.size() >= kMinParallelWork)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    grad_in[i] = grad_out[i] * out[i] * (1.0 - out[i]);
}

}  // namespace parallel

}  // namespace fingerloc::kernels
