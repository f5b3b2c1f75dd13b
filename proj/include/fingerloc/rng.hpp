#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace fingerloc {

// Derives an independent child seed from a parent seed, a purpose tag and an
// index. All randomness in the toolkit flows from one root seed through this
// function: command seed -> module tag -> per-trial / per-location index.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag,
                          std::uint64_t index = 0);

// Seeded generator with distribution code written out here so that draws are
// identical across standard library implementations (the std:: distributions
// are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lower, upper]; returns lower when the range is degenerate.
  double uniform(double lower, double upper) {
    return lower + (upper - lower) * uniform();
  }

  // Standard normal via Box-Muller (one value per call).
  double normal();

  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = below(i);
      using std::swap;
      swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fingerloc
