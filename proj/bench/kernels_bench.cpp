// Serial reference kernels against their OpenMP counterparts, at the shapes
// the models use plus a larger batch. Pass --benchmark_filter to pick one.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fingerloc/kernels.hpp"
#include "fingerloc/rng.hpp"

namespace k = fingerloc::kernels;

namespace {

std::vector<double> filled(std::size_t n, std::uint64_t seed) {
  fingerloc::Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

// The second benchmark argument is the OpenMP thread count.
void set_threads(const benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(std::max<std::int64_t>(1, state.range(1))));
}

template <bool Parallel>
void dense_forward(benchmark::State& state) {
  set_threads(state);
  const k::DenseDims d{static_cast<std::size_t>(state.range(0)), 50, 50};
  const auto in = filled(d.batch * d.in, 1), w = filled(d.out * d.in, 2), b = filled(d.out, 3);
  std::vector<double> out(d.batch * d.out);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::dense_forward(d, in, w, b, out);
    } else {
      k::reference::dense_forward(d, in, w, b, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.batch));
}

template <bool Parallel>
void dense_backward(benchmark::State& state) {
  set_threads(state);
  const k::DenseDims d{static_cast<std::size_t>(state.range(0)), 50, 50};
  const auto in = filled(d.batch * d.in, 1), w = filled(d.out * d.in, 2);
  const auto g = filled(d.batch * d.out, 3);
  std::vector<double> gi(d.batch * d.in), gw(d.out * d.in), gb(d.out);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::dense_backward(d, in, w, g, gi, gw, gb);
    } else {
      k::reference::dense_backward(d, in, w, g, gi, gw, gb);
    }
    benchmark::DoNotOptimize(gw.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.batch));
}

// First CNN convolution: 1 -> 12 channels, 7x7 kernel on the 25x25 image.
k::ConvDims conv_dims(const benchmark::State& state) {
  return {static_cast<std::size_t>(state.range(0)), 1, 12, 25, 25, 7, 7};
}

template <bool Parallel>
void conv2d_forward(benchmark::State& state) {
  set_threads(state);
  const k::ConvDims d = conv_dims(state);
  const auto in = filled(d.batch * d.in_h * d.in_w, 1);
  const auto w = filled(d.out_channels * d.kernel_h * d.kernel_w, 2);
  const auto b = filled(d.out_channels, 3);
  std::vector<double> out(d.batch * d.out_channels * d.out_h() * d.out_w());
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::conv2d_forward(d, in, w, b, out);
    } else {
      k::reference::conv2d_forward(d, in, w, b, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.batch));
}

template <bool Parallel>
void conv2d_backward(benchmark::State& state) {
  set_threads(state);
  const k::ConvDims d = conv_dims(state);
  const auto in = filled(d.batch * d.in_h * d.in_w, 1);
  const auto w = filled(d.out_channels * d.kernel_h * d.kernel_w, 2);
  const auto g = filled(d.batch * d.out_channels * d.out_h() * d.out_w(), 3);
  std::vector<double> gi(in.size()), gw(w.size()), gb(d.out_channels);
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::conv2d_backward(d, in, w, g, gi, gw, gb);
    } else {
      k::reference::conv2d_backward(d, in, w, g, gi, gw, gb);
    }
    benchmark::DoNotOptimize(gw.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.batch));
}

// First CNN pooling: window 3 over 12 channels of 19x19.
template <bool Parallel>
void maxpool_forward(benchmark::State& state) {
  set_threads(state);
  const k::PoolDims d{static_cast<std::size_t>(state.range(0)), 12, 19, 19, 3};
  const auto in = filled(d.batch * d.channels * d.in_h * d.in_w, 1);
  std::vector<double> out(d.batch * d.channels * d.out_h() * d.out_w());
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::parallel::maxpool_forward(d, in, out);
    } else {
      k::reference::maxpool_forward(d, in, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.batch));
}

void serial_args(benchmark::internal::Benchmark* b) {
  for (int batch : {100, 1000}) b->Args({batch, 1});
}

void parallel_args(benchmark::internal::Benchmark* b) {
  const int max_threads = omp_get_max_threads();
  for (int batch : {100, 1000}) {
    for (int threads = 1; threads <= max_threads; threads *= 2) b->Args({batch, threads});
  }
}

}  // namespace

BENCHMARK(dense_forward<false>)->Apply(serial_args)->ArgNames({"batch", "threads"});
BENCHMARK(dense_forward<true>)->Apply(parallel_args)->ArgNames({"batch", "threads"})->UseRealTime();
BENCHMARK(dense_backward<false>)->Apply(serial_args)->ArgNames({"batch", "threads"});
BENCHMARK(dense_backward<true>)->Apply(parallel_args)->ArgNames({"batch", "threads"})->UseRealTime();
BENCHMARK(conv2d_forward<false>)->Apply(serial_args)->ArgNames({"batch", "threads"});
BENCHMARK(conv2d_forward<true>)->Apply(parallel_args)->ArgNames({"batch", "threads"})->UseRealTime();
BENCHMARK(conv2d_backward<false>)->Apply(serial_args)->ArgNames({"batch", "threads"});
BENCHMARK(conv2d_backward<true>)->Apply(parallel_args)->ArgNames({"batch", "threads"})->UseRealTime();
BENCHMARK(maxpool_forward<false>)->Apply(serial_args)->ArgNames({"batch", "threads"});
BENCHMARK(maxpool_forward<true>)->Apply(parallel_args)->ArgNames({"batch", "threads"})->UseRealTime();

BENCHMARK_MAIN();
