#include "fingerloc/optimizer.hpp"

#include <cmath>

#include "fingerloc/error.hpp"

namespace fingerloc {
namespace {

std::vector<NdArray> zeros_like(std::span<const NdArray* const> shapes) {
  std::vector<NdArray> out;
  out.reserve(shapes.size());
  for (const NdArray* p : shapes) out.emplace_back(p->shape());
  return out;
}

void check_step(std::span<NdArray* const> parameters,
                std::span<const NdArray> gradients,
                const std::vector<NdArray>& state) {
  if (parameters.size() != gradients.size() || parameters.size() != state.size()) {
    throw ShapeError("optimizer: parameter/gradient count mismatch");
  }
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    if (parameters[k]->shape() != gradients[k].shape() ||
        parameters[k]->shape() != state[k].shape()) {
      throw ShapeError("optimizer: gradient " + std::to_string(k) + " has shape " +
                       shape_to_string(gradients[k].shape()) + ", parameter " +
                       shape_to_string(parameters[k]->shape()));
    }
  }
}

}  // namespace

AdamState::AdamState(const AdamParams& params,
                     std::span<const NdArray* const> shapes)
    : params_(params), m_(zeros_like(shapes)), v_(zeros_like(shapes)) {
  if (!(params.beta1 >= 0.0 && params.beta1 < 1.0) ||
      !(params.beta2 >= 0.0 && params.beta2 < 1.0)) {
    throw ConfigError("adam: beta1 and beta2 must lie in [0, 1)");
  }
}

void AdamState::step(std::span<NdArray* const> parameters,
                     std::span<const NdArray> gradients) {
  check_step(parameters, gradients, m_);
  ++t_;
  const double b1 = params_.beta1, b2 = params_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double lr = params_.learning_rate, eps = params_.epsilon;
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    double* p = parameters[k]->data();
    const double* g = gradients[k].data();
    double* m = m_[k].data();
    double* v = v_[k].data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(m_[k].size());
#pragma omp parallel for simd if (n >= 65536)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

SgdMomentumState::SgdMomentumState(const SgdMomentumParams& params,
                                   std::span<const NdArray* const> shapes)
    : params_(params), velocity_(zeros_like(shapes)) {
  if (!(params.momentum >= 0.0 && params.momentum < 1.0)) {
    throw ConfigError("sgd: momentum must lie in [0, 1)");
  }
}

void SgdMomentumState::step(std::span<NdArray* const> parameters,
                            std::span<const NdArray> gradients) {
  check_step(parameters, gradients, velocity_);
  ++t_;
  const double mu = params_.momentum, lr = params_.learning_rate;
  for (std::size_t k = 0; k < parameters.size(); ++k) {
    double* p = parameters[k]->data();
    const double* g = gradients[k].data();
    double* vel = velocity_[k].data();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(velocity_[k].size());
#pragma omp parallel for simd if (n >= 65536)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      vel[i] = mu * vel[i] - lr * g[i];
      p[i] += vel[i];
    }
  }
}

}  // namespace fingerloc
