// End-to-end runs at small scale: feature-regression model vs pixel baseline,
// and the alternating fine-tuner's separation diagnostic.

#include <cmath>
#include <complex>
#include <memory>

#include "doctest.h"
#include "oracles.hpp"
#include "ssr/degradation.hpp"
#include "ssr/fft.hpp"
#include "ssr/finetune.hpp"
#include "ssr/inference.hpp"
#include "ssr/metrics.hpp"
#include "ssr/synthetic.hpp"
#include "ssr/train.hpp"

using namespace ssr;

namespace {

constexpr std::size_t kPatch = 16;

ScatteringConfig small_cfg() {
  ScatteringConfig cfg;
  cfg.scales = 2;
  cfg.orientations = 4;
  cfg.max_order = 2;
  cfg.include_tv = true;
  cfg.oversampling = 0;  // stride 4, matches the two stride-2 stages below
  return cfg;
}

PredictorNetwork small_phi(std::size_t channels, std::uint64_t seed) {
  using K = LayerSpec::Kind;
  std::vector<LayerSpec> layers = {
      {K::kConvolution, 12, 7, 7, 1, true},
      {K::kDownsample, 0, 1, 1, 2, false},
      {K::kConvolution, 16, 5, 5, 1, true},
      {K::kDownsample, 0, 1, 1, 2, false},
      {K::kConvolution, 16, 3, 3, 1, true},
      {K::kLinearOutput, channels, 1, 1, 1, false},
  };
  return PredictorNetwork(std::move(layers), 1, seed);
}

std::vector<TrainPair> texture_pairs(const DegradationModel& deg, std::size_t count,
                                     bool pixel_targets, std::uint64_t seed) {
  std::vector<TrainPair> pairs;
  for (std::size_t i = 0; i < count; ++i) {
    const Image y = synth_texture(kPatch, kPatch, seed + i);
    TrainPair p;
    p.x = downsample(y, deg);
    p.target = pixel_targets ? y : residual(y, p.x, deg);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

double high_band_energy(const Image& img, double cutoff_radius) {
  const ComplexGrid spec = fft2(img);
  double acc = 0.0;
  for (std::size_t y = 0; y < spec.height; ++y) {
    const double ky = (y < spec.height - spec.height / 2)
                          ? static_cast<double>(y)
                          : static_cast<double>(y) - static_cast<double>(spec.height);
    const double wy = 2.0 * oracle::kPi * ky / static_cast<double>(spec.height);
    for (std::size_t x = 0; x < spec.width; ++x) {
      const double kx = (x < spec.width - spec.width / 2)
                            ? static_cast<double>(x)
                            : static_cast<double>(x) - static_cast<double>(spec.width);
      const double wx = 2.0 * oracle::kPi * kx / static_cast<double>(spec.width);
      if (std::hypot(wx, wy) > cutoff_radius) acc += std::norm(spec.at(y, x));
    }
  }
  return acc;
}

}  // namespace

TEST_CASE("super-resolution recovers more high-band content than the pixel baseline") {
  const DegradationModel deg{2};
  const ScatteringConfig cfg = small_cfg();
  FilterBank bank = build_morlet_bank(cfg.scales, cfg.orientations, kPatch, kPatch, {}, true);
  auto psi = std::make_shared<ScatteringNetwork>(std::move(bank), cfg);

  // identical data and step budgets for both routes; full batches keep the
  // tiny-set trace smooth enough for the moving-average monotonicity check
  const std::size_t n_train = 16;
  TrainConfig tc;
  tc.steps = 350;
  tc.batch_size = n_train;
  tc.lr = 1e-3;
  tc.seed = 3;
  tc.threads = 2;

  PredictorNetwork phi = small_phi(psi->channels(), 21);
  {
    const auto pairs = texture_pairs(deg, n_train, false, 600);
    const auto samples = prepare_samples(pairs, psi.get(), deg, TrainConfig::Objective::kFeatureRegression);
    const TrainResult res = train(phi, samples, tc);
    CHECK(res.loss_trace.back() < res.loss_trace.front());

    // loss trace is monotone through a window-50 moving average
    const auto& trace = res.loss_trace;
    double running_min = 1e300;
    for (std::size_t i = 0; i + 50 <= trace.size(); i += 10) {
      double ma = 0.0;
      for (std::size_t k = i; k < i + 50; ++k) ma += trace[k];
      ma /= 50.0;
      CHECK(ma <= running_min * 1.05);
      running_min = std::min(running_min, ma);
    }
  }

  PredictorNetwork baseline = build_baseline_default(22);
  {
    const auto pairs = texture_pairs(deg, n_train, true, 600);
    const auto samples = prepare_samples(pairs, nullptr, deg, TrainConfig::Objective::kPixelRegression);
    TrainConfig bc = tc;
    bc.batch_size = 4;  // the moving-average check only applies above
    train(baseline, samples, bc);
  }

  // evaluate on one of the training images
  const Image y = synth_texture(kPatch, kPatch, 600);
  const Image x = downsample(y, deg);
  const Image up = linear_predict(x, deg);

  GibbsModel model;
  model.phi = phi;
  model.psi = psi;
  model.degradation = deg;
  model.lambda_tv = 1e-8;
  InferenceConfig icfg;
  icfg.iterations = 200;
  icfg.init = InferenceConfig::Init::kLinearPredict;
  icfg.seed = 5;
  const Image gibbs_out = super_resolve(model, x, icfg);
  const Image baseline_out = baseline.forward(up);

  const double cutoff = oracle::kPi / deg.factor;
  const double gibbs_high = high_band_energy(gibbs_out - up, cutoff);
  const double baseline_high = high_band_energy(baseline_out - up, cutoff);
  INFO("high-band energy: gibbs " << gibbs_high << " baseline " << baseline_high);
  CHECK(gibbs_high >= 2.0 * baseline_high);
}

TEST_CASE("fine-tuning keeps the data term while pushing negatives away") {
  const DegradationModel deg{2};
  ScatteringConfig cfg = small_cfg();
  cfg.orientations = 2;
  FilterBank bank = build_morlet_bank(cfg.scales, cfg.orientations, kPatch, kPatch, {}, true);

  FineTuneModel model;
  model.psi = std::make_shared<TrainableScattering>(std::move(bank), cfg);
  model.phi = small_phi(model.psi->channels(), 31);
  model.degradation = deg;
  model.lambda_tv = 1e-8;

  // pre-train Phi briefly so the fine-tuner starts from a sensible pairing
  std::vector<TrainPair> data;
  for (std::size_t i = 0; i < 32; ++i) {
    const Image y = synth_texture(kPatch, kPatch, 700 + i);
    TrainPair p;
    p.x = downsample(y, deg);
    p.target = residual(y, p.x, deg);
    data.push_back(std::move(p));
  }
  {
    const auto samples =
        prepare_samples(data, model.psi.get(), deg, TrainConfig::Objective::kFeatureRegression);
    TrainConfig tc;
    tc.steps = 150;
    tc.batch_size = 4;
    tc.lr = 1e-3;
    tc.seed = 8;
    tc.threads = 2;
    train(model.phi, samples, tc);
  }

  FineTuneConfig fc;
  fc.steps = 50;
  fc.negatives = 1;
  fc.sigma_perturb = 0.05;
  fc.phi_lr = 2e-5;
  fc.psi_base_lr = 1e-2;
  fc.eta = 1e-4;
  fc.seed = 12;
  fc.sampler.iterations = 25;
  const FineTuneResult res = finetune(model, data, fc);
  REQUIRE(res.rows.size() == 50);

  auto mean_over = [&](std::size_t lo, std::size_t hi, auto getter) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += getter(res.rows[i]);
    return acc / static_cast<double>(hi - lo);
  };
  const double data_first = mean_over(0, 5, [](const auto& r) { return r.data_energy; });
  const double data_last = mean_over(45, 50, [](const auto& r) { return r.data_energy; });
  const double neg_first = mean_over(0, 5, [](const auto& r) { return r.negative_energy; });
  const double neg_last = mean_over(45, 50, [](const auto& r) { return r.negative_energy; });
  INFO("data " << data_first << " -> " << data_last << ", negatives " << neg_first << " -> "
               << neg_last);
  CHECK(data_last <= 1.10 * data_first);
  CHECK(neg_last >= 0.98 * neg_first);
}
