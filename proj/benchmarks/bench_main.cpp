#include <benchmark/benchmark.h>

#include "ssr/degradation.hpp"
#include "ssr/feature_network.hpp"
#include "ssr/fft.hpp"
#include "ssr/inference.hpp"
#include "ssr/predictor.hpp"
#include "ssr/rng.hpp"
#include "ssr/synthetic.hpp"

using namespace ssr;

namespace {

Image random_image(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Image img(1, n, n);
  for (auto& v : img.data) v = rng.uniform();
  return img;
}

const ScatteringNetwork& psi64() {
  static const ScatteringNetwork psi = [] {
    ScatteringConfig cfg;
    cfg.oversampling = 1;
    FilterBank bank = build_morlet_bank(3, 8, 64, 64, {}, true);
    return ScatteringNetwork(std::move(bank), cfg);
  }();
  return psi;
}

}  // namespace

static void BM_Fft2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Image img = random_image(n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fft2(img));
  }
}
BENCHMARK(BM_Fft2)->Arg(64)->Arg(96)->Arg(128);

static void BM_ScatterForward64(benchmark::State& state) {
  const Image img = random_image(64, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi64().forward(img));
  }
}
BENCHMARK(BM_ScatterForward64);

static void BM_ScatterLossGrad64(benchmark::State& state) {
  const Image img = random_image(64, 3);
  const Image target = psi64().forward(random_image(64, 4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi64().loss_grad(img, target));
  }
}
BENCHMARK(BM_ScatterLossGrad64);

static void BM_PredictorForward64(benchmark::State& state) {
  const PredictorNetwork phi = build_phi_default(1);
  const Image img = random_image(64, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(phi.forward(img));
  }
}
BENCHMARK(BM_PredictorForward64);

static void BM_PredictorBackward64(benchmark::State& state) {
  const PredictorNetwork phi = build_phi_default(1);
  const Image img = random_image(64, 6);
  PredictorNetwork::Trace trace;
  const Image out = phi.forward_trace(img, &trace);
  std::vector<double> grad;
  for (auto _ : state) {
    phi.backward(trace, out, &grad, nullptr);
    benchmark::DoNotOptimize(grad);
  }
}
BENCHMARK(BM_PredictorBackward64);

static void BM_Downsample(benchmark::State& state) {
  const DegradationModel deg{static_cast<unsigned>(state.range(0))};
  const Image img = random_image(96, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(downsample(img, deg));
  }
}
BENCHMARK(BM_Downsample)->Arg(2)->Arg(3)->Arg(4);

static void BM_LinearPredict(benchmark::State& state) {
  const DegradationModel deg{static_cast<unsigned>(state.range(0))};
  const Image img = random_image(32, 8);
  for (auto _ : state) {
    benchmark::DoNotOptimize(linear_predict(img, deg));
  }
}
BENCHMARK(BM_LinearPredict)->Arg(2)->Arg(3)->Arg(4);

BENCHMARK_MAIN();
