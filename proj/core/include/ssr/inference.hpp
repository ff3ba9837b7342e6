#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ssr/degradation.hpp"
#include "ssr/feature_network.hpp"
#include "ssr/predictor.hpp"

namespace ssr {

/// The conditional model bundle: p(r|x) ~ exp(-||Phi(x) - Psi(r)||^2
/// - lambda_tv TV(r)). Construction asserts that the predictor and the
/// feature network agree on channels and grid stride.
struct GibbsModel {
  PredictorNetwork phi;
  std::shared_ptr<const FeatureNetwork> psi;
  DegradationModel degradation;
  double lambda_tv = 1e-8;

  void validate() const;
};

struct InferenceConfig {
  enum class Optimizer { kAdam, kGdBacktracking };
  enum class Init { kLinearPredict, kZeros, kGaussianNoise, kPerturbed };

  std::size_t iterations = 100;
  Optimizer optimizer = Optimizer::kAdam;
  double lr = 0.05;  // Adam step size / initial gradient-descent step
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  Init init = Init::kLinearPredict;
  double init_sigma = 0.0;  // gaussian-noise scale / perturbation scale
  std::uint64_t seed = 0;
  /// Two-stage step decay for Adam: the step is multiplied by this factor
  /// once 60% of the budget is spent and again at 86%. 1 keeps it constant.
  double lr_drop_factor = 1.0;

  void validate() const;
};

struct EnergyTraceRow {
  std::size_t iteration;
  double feature_term;  // ||target - Psi(r)||^2
  double tv_term;       // lambda_tv * TV(r)
};

struct SampleResult {
  Image sample;
  std::vector<EnergyTraceRow> trace;
  std::size_t feature_evals = 0;  // Psi forward+backward passes (cost model)
  double final_energy = 0.0;
};

/// Isotropic discrete total variation, forward differences with circular
/// wrap: sum over pixels of sqrt(dx^2 + dy^2).
double tv_norm(const Image& r);

/// Subgradient of tv_norm; zero at pixels whose local gradient magnitude is
/// below 1e-12 (same convention as the modulus).
Image tv_subgradient(const Image& r);

/// ||x_features - Psi(r)||^2 + lambda_tv * TV(r).
double gibbs_energy(const GibbsModel& model, const Image& x_features, const Image& r);

/// Core optimizer: descend || target - Psi(r) ||^2 + lambda_tv TV(r) over r.
/// Returns the lowest-energy iterate seen, so the result never exceeds the
/// initialization energy. With gradient descent + backtracking the trace is
/// non-increasing by construction.
SampleResult sample_to_target(const FeatureNetwork& psi, const Image& target_features,
                              std::size_t height, std::size_t width, double lambda_tv,
                              const InferenceConfig& cfg, const Image* init_base = nullptr);

/// Mode sampling: computes Phi once on the upsampled observation, then runs
/// sample_to_target.
SampleResult sample_mode(const GibbsModel& model, const Image& x, const InferenceConfig& cfg);

/// n mode-sampling runs from init = linear_predict(x) + N(0, sigma_perturb),
/// seeds derived as cfg.seed + run index.
std::vector<SampleResult> sample_isoprobability(const GibbsModel& model, const Image& x,
                                                std::size_t n, double sigma_perturb,
                                                const InferenceConfig& cfg);

/// linear_predict(x) + sampled residual; raw (unclamped) output. Use
/// clamp_unit for display.
Image super_resolve(const GibbsModel& model, const Image& x, const InferenceConfig& cfg,
                    SampleResult* details = nullptr);

Image clamp_unit(const Image& img);

void write_energy_trace_csv(const std::vector<EnergyTraceRow>& trace, const std::string& path);

}  // namespace ssr
