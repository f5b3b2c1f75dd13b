#include "fingerloc/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "fingerloc/error.hpp"

namespace fingerloc {
namespace {

// In-place lower Cholesky factor of a row-major n x n matrix. Returns false if
// the matrix is not numerically positive definite.
bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double l = std::sqrt(diag);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / l;
    }
    for (std::size_t i = 0; i < j; ++i) a[i * n + j] = 0.0;
  }
  return true;
}

// Solves L z = b in place.
void forward_solve(const std::vector<double>& l, std::size_t n,
                   std::vector<double>& b) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * b[k];
    b[i] = v / l[i * n + i];
  }
}

// Solves L^T z = b in place.
void backward_solve(const std::vector<double>& l, std::size_t n,
                    std::vector<double>& b) {
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= l[k * n + i] * b[k];
    b[i] = v / l[i * n + i];
  }
}

}  // namespace

GpSurrogate GpSurrogate::fit(std::vector<std::vector<double>> points,
                             std::vector<double> objectives,
                             const KernelParams& kernel,
                             std::optional<double> prior_mean) {
  if (points.empty() || points.size() != objectives.size()) {
    throw ConfigError("gp: need at least one observation and one objective per point");
  }
  for (double y : objectives) {
    if (!std::isfinite(y)) throw NumericalError("gp: non-finite objective");
  }
  if (!(kernel.lengthscale > 0.0) || !(kernel.signal_variance > 0.0) ||
      kernel.noise_variance < 0.0) {
    throw ConfigError("gp: lengthscale and signal variance must be positive");
  }
  GpSurrogate gp;
  gp.points_ = std::move(points);
  gp.kernel_ = kernel;
  const std::size_t n = gp.points_.size();
  gp.prior_mean_ = prior_mean.value_or(
      std::accumulate(objectives.begin(), objectives.end(), 0.0) /
      static_cast<double>(n));

  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      k[i * n + j] = k[j * n + i] = gp.kernel(gp.points_[i], gp.points_[j]);
    }
  }
  const double max_jitter = 1e-6 * kernel.signal_variance;
  double jitter = 0.0;
  while (true) {
    gp.chol_ = k;
    for (std::size_t i = 0; i < n; ++i) {
      gp.chol_[i * n + i] += kernel.noise_variance + jitter;
    }
    if (cholesky(gp.chol_, n)) break;
    jitter = jitter == 0.0 ? 1e-12 * kernel.signal_variance : jitter * 10.0;
    if (jitter > max_jitter) {
      throw NumericalError("gp: kernel matrix is not positive definite (n=" +
                           std::to_string(n) + ")");
    }
  }
  gp.jitter_ = jitter;

  gp.alpha_.resize(n);
  for (std::size_t i = 0; i < n; ++i) gp.alpha_[i] = objectives[i] - gp.prior_mean_;
  forward_solve(gp.chol_, n, gp.alpha_);
  backward_solve(gp.chol_, n, gp.alpha_);

  // One refinement step with the residual in extended precision. The kernel
  // matrix is badly conditioned when points cluster, and this recovers most of
  // the accuracy the plain solve loses.
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    long double r = static_cast<long double>(objectives[i]) - gp.prior_mean_;
    for (std::size_t j = 0; j < n; ++j) {
      long double a = k[i * n + j];
      if (i == j) a += static_cast<long double>(kernel.noise_variance) + jitter;
      r -= a * gp.alpha_[j];
    }
    residual[i] = static_cast<double>(r);
  }
  forward_solve(gp.chol_, n, residual);
  backward_solve(gp.chol_, n, residual);
  for (std::size_t i = 0; i < n; ++i) gp.alpha_[i] += residual[i];
  return gp;
}

double GpSurrogate::kernel(std::span<const double> a,
                           std::span<const double> b) const {
  if (a.size() != b.size()) throw ShapeError("gp: point dimension mismatch");
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return kernel_.signal_variance *
         std::exp(-d2 / (2.0 * kernel_.lengthscale * kernel_.lengthscale));
}

Posterior GpSurrogate::predict(std::span<const double> query) const {
  const std::size_t n = points_.size();
  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i) ks[i] = kernel(points_[i], query);
  Posterior p;
  long double mean = prior_mean_;
  for (std::size_t i = 0; i < n; ++i) mean += static_cast<long double>(ks[i]) * alpha_[i];
  p.mean = static_cast<double>(mean);
  forward_solve(chol_, n, ks);
  double explained = 0.0;
  for (double v : ks) explained += v * v;
  p.variance = kernel_.signal_variance - explained;
  // Round-off floor: at a noiseless observed point the variance is exactly 0.
  if (p.variance < 1e-12 * kernel_.signal_variance) p.variance = 0.0;
  return p;
}

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double stddev, double best) {
  const double gain = best - mean;
  if (!(stddev > 0.0)) {
    // A noiseless observation reproduces its objective up to round-off.
    return gain > 1e-12 * std::max(1.0, std::abs(best)) ? gain : 0.0;
  }
  const double z = gain / stddev;
  return std::max(0.0, gain * normal_cdf(z) + stddev * normal_pdf(z));
}

double expected_improvement(const GpSurrogate& surrogate,
                            std::span<const double> query, double best) {
  const Posterior p = surrogate.predict(query);
  return expected_improvement(p.mean, std::sqrt(p.variance), best);
}

}  // namespace fingerloc
