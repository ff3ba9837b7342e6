#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ssr/inference.hpp"
#include "ssr/train.hpp"
#include "ssr/trainable_scattering.hpp"

namespace ssr {

/// Model bundle whose feature network has free parameters.
struct FineTuneModel {
  PredictorNetwork phi;
  std::shared_ptr<TrainableScattering> psi;
  DegradationModel degradation;
  double lambda_tv = 1e-8;

  GibbsModel gibbs() const;  // sampling view over the shared psi
};

struct FineTuneConfig {
  double eta = 1e-4;           // Psi learning-rate factor
  std::size_t negatives = 1;   // L, samples per datum
  double sigma_perturb = 0.05;
  double phi_lr = 1e-4;
  double psi_base_lr = 1e-2;   // Psi step = psi_base_lr * eta
  std::size_t steps = 50;
  std::uint64_t seed = 0;
  bool dry_run = false;        // report gradient statistics without updating
  double divergence_norm = 1e8;
  InferenceConfig sampler;     // negative-sample generation settings
};

struct FineTuneDiagnosticsRow {
  std::size_t step;
  double data_energy;      // ||Phi(x) - Psi(r)||^2
  double negative_energy;  // mean over negatives of ||Phi(x) - Psi(r')||^2
  double phi_grad_norm;
  double psi_grad_norm;
};

struct FineTuneResult {
  std::vector<FineTuneDiagnosticsRow> rows;
};

/// Likelihood-gradient estimators with the sample average over the provided
/// negatives:
///   psi: -grad Psi(r)^T (Phi(x) - Psi(r)) + 1/L sum grad Psi(r')^T (Phi(x) - Psi(r'))
///   phi:  grad Phi(x)^T (1/L sum Psi(r') - Psi(r))
/// Both vanish identically when every negative equals the data point.
std::vector<double> grad_psi_estimate(const FineTuneModel& model, const Image& x, const Image& r,
                                      const std::vector<Image>& samples);
std::vector<double> grad_phi_estimate(const FineTuneModel& model, const Image& x, const Image& r,
                                      const std::vector<Image>& samples);

/// Alternating fine-tuning: per step pick a datum, generate L negatives with
/// the biased mode sampler (perturbed initializations), compute both
/// estimators at the current parameters, apply the Phi step then the Psi step
/// (scaled by eta). Deterministic given the seed. Aborts with diagnostics on
/// exploding gradient norms or non-finite energies.
FineTuneResult finetune(FineTuneModel& model, const std::vector<TrainPair>& data,
                        const FineTuneConfig& cfg);

void write_finetune_csv(const FineTuneResult& result, const std::string& path);

}  // namespace ssr
