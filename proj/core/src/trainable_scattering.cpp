#include "ssr/trainable_scattering.hpp"

#include <stdexcept>

namespace ssr {

TrainableScattering::TrainableScattering(FilterBank bank, ScatteringConfig cfg)
    : bank_(std::move(bank)), cfg_(cfg) {
  cfg_.validate();
  if (bank_.scales != cfg_.scales || bank_.orientations != cfg_.orientations) {
    throw std::invalid_argument("TrainableScattering: bank does not match config");
  }
  if (cfg_.include_tv && !bank_.has_tv) {
    throw std::invalid_argument("TrainableScattering: config needs a TV channel");
  }
  n_channels_ = path_count(cfg_);
  const std::size_t plane = bank_.height * bank_.width;
  n_params_ = 2 * plane * (bank_.bandpass.size() + (bank_.has_tv ? 1 : 0));
}

Image TrainableScattering::forward(const Image& r) const {
  return scatter_forward(r, bank_, cfg_).maps;
}

FeatureLossGrad TrainableScattering::loss_grad(const Image& r, const Image& target) const {
  const ScatterLossGrad slg = scatter_loss_grad_raw(r, target, bank_, cfg_, nullptr);
  return {slg.loss, slg.grad};
}

std::vector<double> TrainableScattering::parameters() const {
  std::vector<double> flat;
  flat.reserve(n_params_);
  auto pack = [&](const ComplexGrid& g) {
    for (const auto& z : g.data) {
      flat.push_back(z.real());
      flat.push_back(z.imag());
    }
  };
  for (const auto& plane : bank_.bandpass) pack(plane);
  if (bank_.has_tv) pack(bank_.tv);
  return flat;
}

void TrainableScattering::set_parameters(const std::vector<double>& flat) {
  if (flat.size() != n_params_) throw std::invalid_argument("TrainableScattering: wrong size");
  std::size_t off = 0;
  auto unpack = [&](ComplexGrid& g) {
    for (auto& z : g.data) {
      z = {flat[off], flat[off + 1]};
      off += 2;
    }
  };
  for (auto& plane : bank_.bandpass) unpack(plane);
  if (bank_.has_tv) unpack(bank_.tv);
}

void TrainableScattering::add_scaled(const std::vector<double>& direction, double scale) {
  if (direction.size() != n_params_) throw std::invalid_argument("TrainableScattering: wrong size");
  std::size_t off = 0;
  auto bump = [&](ComplexGrid& g) {
    for (auto& z : g.data) {
      z += std::complex<double>(scale * direction[off], scale * direction[off + 1]);
      off += 2;
    }
  };
  for (auto& plane : bank_.bandpass) bump(plane);
  if (bank_.has_tv) bump(bank_.tv);
}

std::vector<double> TrainableScattering::param_grad(const Image& r, const Image& target) const {
  ScatterFilterGrads fg;
  scatter_loss_grad_raw(r, target, bank_, cfg_, &fg);
  std::vector<double> flat;
  flat.reserve(n_params_);
  auto pack = [&](const ComplexGrid& g) {
    for (const auto& z : g.data) {
      flat.push_back(z.real());   // d/dRe
      flat.push_back(z.imag());   // d/dIm
    }
  };
  for (const auto& plane : fg.bandpass) pack(plane);
  if (fg.has_tv) pack(fg.tv);
  return flat;
}

}  // namespace ssr
