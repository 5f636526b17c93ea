#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "casiam/kernels.hpp"

using namespace casiam;
namespace k = casiam::kernels;

namespace {

Tensor3 random_tensor(int c, int h, int w, std::uint64_t seed) {
  Tensor3 t(c, h, w);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  for (float& v : t.data()) v = d(rng);
  return t;
}

std::vector<float> random_vector(std::size_t n, std::uint64_t seed) {
  std::vector<float> v(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-1.0f, 1.0f);
  for (float& x : v) x = d(rng);
  return v;
}

k::ConvWeights random_conv(int out, int in, int kernel, int stride) {
  k::ConvWeights c;
  c.out_channels = out;
  c.in_channels = in;
  c.kernel = kernel;
  c.stride = stride;
  c.weights = random_vector(static_cast<std::size_t>(out) * in * kernel * kernel, 3);
  c.bias = random_vector(out, 4);
  return c;
}

// range(0): 0 = serial, 1 = parallel.
bool parallel(const benchmark::State& s) { return s.range(0) == 1; }

void BM_xcorr_features(benchmark::State& state) {
  const Tensor3 cand = random_tensor(16, 22, 22, 1), ex = random_tensor(16, 6, 6, 2);
  for (auto _ : state) {
    auto m = parallel(state) ? k::parallel::xcorr_valid(cand, ex, 0.0f)
                             : k::serial::xcorr_valid(cand, ex, 0.0f);
    benchmark::DoNotOptimize(m.values.data());
  }
}

void BM_xcorr_pixels(benchmark::State& state) {
  const Tensor3 cand = random_tensor(1, 254, 254, 1), ex = random_tensor(1, 127, 127, 2);
  for (auto _ : state) {
    auto m = parallel(state) ? k::parallel::xcorr_valid(cand, ex, 0.0f)
                             : k::serial::xcorr_valid(cand, ex, 0.0f);
    benchmark::DoNotOptimize(m.values.data());
  }
}

void BM_conv2d(benchmark::State& state) {
  const Tensor3 in = random_tensor(3, 255, 255, 5);
  const k::ConvWeights conv = random_conv(8, 3, 15, 4);
  for (auto _ : state) {
    auto out = parallel(state) ? k::parallel::conv2d(in, conv) : k::serial::conv2d(in, conv);
    benchmark::DoNotOptimize(out.data().data());
  }
}

void BM_dense_forward(benchmark::State& state) {
  const k::DenseShape s{128, 400, 512};
  const auto x = random_vector(std::size_t(s.batch) * s.in, 6);
  const auto w = random_vector(std::size_t(s.in) * s.out, 7);
  const auto b = random_vector(s.out, 8);
  std::vector<float> y(std::size_t(s.batch) * s.out);
  for (auto _ : state) {
    if (parallel(state))
      k::parallel::dense_forward<float>(s, x, w, b, y);
    else
      k::serial::dense_forward<float>(s, x, w, b, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void BM_dense_backward(benchmark::State& state) {
  const k::DenseShape s{128, 400, 512};
  const auto x = random_vector(std::size_t(s.batch) * s.in, 9);
  const auto dy = random_vector(std::size_t(s.batch) * s.out, 10);
  std::vector<float> dw(std::size_t(s.in) * s.out), db(s.out);
  for (auto _ : state) {
    if (parallel(state))
      k::parallel::dense_backward_params<float>(s, x, dy, dw, db);
    else
      k::serial::dense_backward_params<float>(s, x, dy, dw, db);
    benchmark::DoNotOptimize(dw.data());
  }
}

void BM_resize(benchmark::State& state) {
  const auto src = random_vector(255 * 255, 11);
  std::vector<float> dst(107 * 107);
  for (auto _ : state) {
    if (parallel(state))
      k::parallel::resize_bilinear_plane(src, 255, 255, dst, 107, 107);
    else
      k::serial::resize_bilinear_plane(src, 255, 255, dst, 107, 107);
    benchmark::DoNotOptimize(dst.data());
  }
}

}  // namespace

BENCHMARK(BM_xcorr_features)->ArgName("parallel")->Arg(0)->Arg(1);
BENCHMARK(BM_xcorr_pixels)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_conv2d)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dense_forward)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dense_backward)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_resize)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
