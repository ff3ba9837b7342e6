#include "ssr/feature_network.hpp"

#include <stdexcept>

namespace ssr {

FeatureLossGrad IdentityNetwork::loss_grad(const Image& r, const Image& target) const {
  require_same_shape(r, target, "IdentityNetwork::loss_grad");
  FeatureLossGrad out;
  out.grad = r - target;
  out.loss = 0.5 * sq_norm(out.grad);
  return out;
}

ScatteringNetwork::ScatteringNetwork(FilterBank bank, ScatteringConfig cfg)
    : bank_(std::move(bank)), cfg_(cfg) {
  cfg_.validate();
  if (bank_.scales != cfg_.scales || bank_.orientations != cfg_.orientations) {
    throw std::invalid_argument("ScatteringNetwork: bank does not match config");
  }
  if (cfg_.include_tv && !bank_.has_tv) {
    throw std::invalid_argument("ScatteringNetwork: config needs a TV channel");
  }
  n_channels_ = path_count(cfg_);
}

Image ScatteringNetwork::forward(const Image& r) const {
  return scatter_forward(r, bank_, cfg_).maps;
}

ScatteringCoefficients ScatteringNetwork::coefficients(const Image& r) const {
  return scatter_forward(r, bank_, cfg_);
}

FeatureLossGrad ScatteringNetwork::loss_grad(const Image& r, const Image& target) const {
  const ScatterLossGrad slg = scatter_loss_grad_raw(r, target, bank_, cfg_, nullptr);
  return {slg.loss, slg.grad};
}

}  // namespace ssr
