#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "owbf/bilateral_direct.hpp"
#include "owbf/fast_bilateral.hpp"
#include "owbf/noise.hpp"
#include "owbf/spatial.hpp"
#include "owbf/sure.hpp"

namespace {

using namespace owbf;

// Smooth shading plus a few hard edges, then noise at sigma 20.
ImageF test_image(int n) {
  ImageF img(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      double v = 120.0 + 60.0 * std::sin(0.07 * x) * std::cos(0.05 * y);
      if ((x / 64 + y / 64) % 2 == 0) v += 50.0;
      img(x, y) = v;
    }
  }
  return add_gaussian_noise(img, {20.0, 1});
}

BilateralParams params(double ss, double sr) {
  BilateralParams p;
  p.sigma_s = ss;
  p.sigma_r = sr;
  return p;
}

void BM_BoxFilter(benchmark::State& state) {
  const ImageF f = test_image(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(box_filter(f, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_BoxFilter)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_GaussianFilter(benchmark::State& state) {
  const ImageF f = test_image(static_cast<int>(state.range(0)));
  GaussianFilter filter{SpatialKernel(static_cast<double>(state.range(1)))};
  ImageF out;
  for (auto _ : state) {
    filter.apply(f, out);
    benchmark::DoNotOptimize(out.pixels().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_GaussianFilter)->Args({512, 2})->Args({512, 5})->Args({1024, 5})->Unit(benchmark::kMillisecond);

void BM_SbfDirect(benchmark::State& state) {
  const ImageF f = test_image(static_cast<int>(state.range(0)));
  const BilateralParams p = params(static_cast<double>(state.range(1)), 30);
  for (auto _ : state) benchmark::DoNotOptimize(sbf_direct(f, p));
}
BENCHMARK(BM_SbfDirect)->Args({256, 2})->Args({256, 5})->Unit(benchmark::kMillisecond);

void BM_FastSbf(benchmark::State& state) {
  const ImageF f = test_image(static_cast<int>(state.range(0)));
  const double sr = static_cast<double>(state.range(2));
  const BilateralParams p = params(static_cast<double>(state.range(1)), sr);
  const ShiftableKernel k = kernel_for(f, sr);
  state.counters["N"] = k.order();
  for (auto _ : state) benchmark::DoNotOptimize(fast_sbf(f, p, k));
}
BENCHMARK(BM_FastSbf)->Args({512, 2, 15})->Args({512, 5, 30})->Unit(benchmark::kMillisecond);

void BM_FastSbfFixedOrder(benchmark::State& state) {
  // Cost per kernel term, independent of the automatic order choice.
  const ImageF f = test_image(512);
  const BilateralParams p = params(static_cast<double>(state.range(0)), 30);
  const ShiftableKernel k = kernel_for(f, 30, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(fast_sbf(f, p, k));
  state.counters["terms"] = k.order() / 2 - k.first_term() + 1;
}
BENCHMARK(BM_FastSbfFixedOrder)->Args({2, 128})->Args({5, 128})->Unit(benchmark::kMillisecond);

void BM_Wbf(benchmark::State& state) {
  const ImageF f = test_image(512);
  const BilateralParams p = params(static_cast<double>(state.range(0)), static_cast<double>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(wbf(f, p, 20.0));
}
BENCHMARK(BM_Wbf)->Args({2, 15})->Args({5, 30})->Unit(benchmark::kMillisecond);

void BM_WbfDirect(benchmark::State& state) {
  const ImageF f = test_image(256);
  const BilateralParams p = params(static_cast<double>(state.range(0)), static_cast<double>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(wbf_direct(f, p, 20.0));
}
BENCHMARK(BM_WbfDirect)->Args({2, 15})->Unit(benchmark::kMillisecond);

void BM_KernelBuild(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ShiftableKernel::build(static_cast<double>(state.range(0)), 255.0));
}
BENCHMARK(BM_KernelBuild)->Arg(15)->Arg(30)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
