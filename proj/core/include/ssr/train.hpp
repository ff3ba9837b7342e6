#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ssr/degradation.hpp"
#include "ssr/feature_network.hpp"
#include "ssr/predictor.hpp"

namespace ssr {

struct TrainConfig {
  enum class Objective { kFeatureRegression, kPixelRegression };
  enum class Optimizer { kSgd, kAdam };

  Objective objective = Objective::kFeatureRegression;
  std::size_t batch_size = 4;
  std::size_t steps = 1000;
  Optimizer optimizer = Optimizer::kAdam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  std::size_t patch = 64;
  unsigned threads = 1;
  double divergence_threshold = 1e6;  // abort when a batch loss exceeds this
};

/// (input, target) pair after preprocessing: the input is the bicubic
/// upsampling of x, the target is Psi(r) in feature mode or y in pixel mode.
struct TrainSample {
  Image input;
  Image target;
};

struct TrainResult {
  std::vector<double> loss_trace;  // mean 1/2||Phi(in)-t||^2 per step
};

/// Minibatch stochastic optimization of the squared loss. Deterministic for a
/// fixed seed; with threads > 1 the per-item gradients are still reduced in
/// item order, so the trace does not depend on the thread count.
TrainResult train(PredictorNetwork& net, const std::vector<TrainSample>& data,
                  const TrainConfig& cfg);

/// Dataset-level entry point: (x, r) pairs in feature mode (psi required) or
/// (x, y) pairs in pixel mode (psi ignored). Inputs are upsampled through the
/// degradation model's linear predictor so the networks share a spatial frame.
struct TrainPair {
  Image x;       // low-resolution observation
  Image target;  // residual r (feature mode) or high-resolution y (pixel mode)
};
std::vector<TrainSample> prepare_samples(const std::vector<TrainPair>& pairs,
                                         const FeatureNetwork* psi,
                                         const DegradationModel& degradation,
                                         TrainConfig::Objective objective);

/// Adam/SGD state shared with the fine-tuner.
class Optimizer {
 public:
  Optimizer(TrainConfig::Optimizer kind, std::size_t n, double lr, double beta1, double beta2,
            double eps);
  /// Returns the update direction (to be added to the parameters).
  void step(const std::vector<double>& grad, std::vector<double>& delta);

 private:
  TrainConfig::Optimizer kind_;
  double lr_, beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

}  // namespace ssr
