#pragma once

#include "ssr/feature_network.hpp"

namespace ssr {

/// Scattering network whose band-pass and TV frequency planes are free
/// complex-valued parameters, initialized from a Morlet bank. The cascade
/// topology, modulus nonlinearities and the low-pass pooling stay fixed.
/// Parameter layout: for each band-pass plane in (scale, orientation) order,
/// then the TV plane when present, interleaved [Re(bin), Im(bin), ...].
class TrainableScattering final : public FeatureNetwork {
 public:
  TrainableScattering(FilterBank bank, ScatteringConfig cfg);

  Image forward(const Image& r) const override;
  FeatureLossGrad loss_grad(const Image& r, const Image& target) const override;
  std::size_t channels() const override { return n_channels_; }
  std::size_t grid_stride() const override { return cfg_.stride(); }

  std::size_t param_count() const { return n_params_; }
  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& flat);
  void add_scaled(const std::vector<double>& direction, double scale);

  /// d/dtheta of 1/2 || Psi(r) - target ||^2 over the free planes.
  std::vector<double> param_grad(const Image& r, const Image& target) const;

  const FilterBank& bank() const { return bank_; }
  const ScatteringConfig& config() const { return cfg_; }

 private:
  FilterBank bank_;
  ScatteringConfig cfg_;
  std::size_t n_channels_ = 0;
  std::size_t n_params_ = 0;
};

}  // namespace ssr
