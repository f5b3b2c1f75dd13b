#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fingerloc/ndarray.hpp"

namespace fingerloc {

struct AdamParams {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct SgdMomentumParams {
  double learning_rate = 0.01;
  double momentum = 0.9;
};

// Adam with bias-corrected moments.
class AdamState {
 public:
  AdamState(const AdamParams& params, std::span<const NdArray* const> shapes);

  void step(std::span<NdArray* const> parameters,
            std::span<const NdArray> gradients);

  const AdamParams& params() const { return params_; }
  std::int64_t step_count() const { return t_; }
  const std::vector<NdArray>& first_moments() const { return m_; }
  const std::vector<NdArray>& second_moments() const { return v_; }

 private:
  AdamParams params_;
  std::vector<NdArray> m_;
  std::vector<NdArray> v_;
  std::int64_t t_ = 0;
};

// velocity = momentum * velocity - lr * grad; parameter += velocity.
class SgdMomentumState {
 public:
  SgdMomentumState(const SgdMomentumParams& params,
                   std::span<const NdArray* const> shapes);

  void step(std::span<NdArray* const> parameters,
            std::span<const NdArray> gradients);

  const SgdMomentumParams& params() const { return params_; }
  std::int64_t step_count() const { return t_; }
  const std::vector<NdArray>& velocities() const { return velocity_; }

 private:
  SgdMomentumParams params_;
  std::vector<NdArray> velocity_;
  std::int64_t t_ = 0;
};

using Optimizer = std::variant<AdamState, SgdMomentumState>;

inline void optimizer_step(Optimizer& optimizer,
                           std::span<NdArray* const> parameters,
                           std::span<const NdArray> gradients) {
  std::visit([&](auto& state) { state.step(parameters, gradients); },
             optimizer);
}

}  // namespace fingerloc
