#pragma once

#include <memory>

#include "ssr/image.hpp"
#include "ssr/scattering.hpp"

namespace ssr {

struct FeatureLossGrad {
  double loss = 0.0;  // 1/2 || Psi(r) - target ||^2
  Image grad;         // exact input gradient
};

/// A differentiable map from a single-channel image to a feature stack, with
/// the input gradient of the squared feature-matching loss. Implementations:
/// the scattering network, the identity network (tests, convex baselines) and
/// predictor networks.
class FeatureNetwork {
 public:
  virtual ~FeatureNetwork() = default;

  virtual Image forward(const Image& r) const = 0;
  virtual FeatureLossGrad loss_grad(const Image& r, const Image& target) const = 0;

  virtual std::size_t channels() const = 0;
  /// Spatial reduction factor: features live on a grid of (h/stride, w/stride).
  virtual std::size_t grid_stride() const = 0;
};

/// Psi(r) = r. Feature matching is then an exact quadratic.
class IdentityNetwork final : public FeatureNetwork {
 public:
  Image forward(const Image& r) const override { return r; }
  FeatureLossGrad loss_grad(const Image& r, const Image& target) const override;
  std::size_t channels() const override { return 1; }
  std::size_t grid_stride() const override { return 1; }
};

/// Scattering transform over a fixed filter bank.
class ScatteringNetwork final : public FeatureNetwork {
 public:
  ScatteringNetwork(FilterBank bank, ScatteringConfig cfg);

  Image forward(const Image& r) const override;
  FeatureLossGrad loss_grad(const Image& r, const Image& target) const override;
  std::size_t channels() const override { return n_channels_; }
  std::size_t grid_stride() const override { return cfg_.stride(); }

  const FilterBank& bank() const { return bank_; }
  const ScatteringConfig& config() const { return cfg_; }
  ScatteringCoefficients coefficients(const Image& r) const;

 protected:
  FilterBank bank_;
  ScatteringConfig cfg_;
  std::size_t n_channels_ = 0;
};

}  // namespace ssr
