#pragma once

#include <optional>
#include <span>
#include <vector>

namespace fingerloc {

// Squared-exponential kernel sf2 * exp(-|a - b|^2 / (2 l^2)).
struct KernelParams {
  double lengthscale = 0.2;
  double signal_variance = 1.0;
  double noise_variance = 1e-6;
};

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

// Exact Gaussian-process regression with a constant prior mean. The Cholesky
// factor of K + noise * I is computed once at fit time; if it fails, diagonal
// jitter is escalated up to 1e-6 * signal variance before giving up with a
// NumericalError.
class GpSurrogate {
 public:
  // Prior mean defaults to the mean of the observations.
  static GpSurrogate fit(std::vector<std::vector<double>> points,
                         std::vector<double> objectives,
                         const KernelParams& kernel,
                         std::optional<double> prior_mean = std::nullopt);

  Posterior predict(std::span<const double> query) const;

  double kernel(std::span<const double> a, std::span<const double> b) const;
  const KernelParams& kernel_params() const { return kernel_; }
  double prior_mean() const { return prior_mean_; }
  double jitter() const { return jitter_; }
  std::size_t size() const { return points_.size(); }

 private:
  GpSurrogate() = default;

  std::vector<std::vector<double>> points_;
  KernelParams kernel_;
  double prior_mean_ = 0.0;
  double jitter_ = 0.0;
  std::vector<double> chol_;   // lower triangle, row-major n x n
  std::vector<double> alpha_;  // (K + noise I)^-1 (y - m)
};

double normal_pdf(double z);
double normal_cdf(double z);

// Expected improvement for minimization:
// (best - mean) Phi(z) + sd phi(z), z = (best - mean) / sd; max(0, best - mean)
// when sd == 0.
double expected_improvement(double mean, double stddev, double best);
double expected_improvement(const GpSurrogate& surrogate,
                            std::span<const double> query, double best);

}  // namespace fingerloc
