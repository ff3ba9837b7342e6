#pragma once

#include <cstdint>
#include <vector>

#include "ssr/rng.hpp"

namespace ssr {

/// Tiny dense map R^in -> R^out (one tanh hidden layer) with manual
/// parameter-gradient backprop. The differentiable relaxation used to define
/// the toy Gibbs model on quantized states: the map is defined on all of R^in
/// and gradients are evaluated at the quantized points.
class ToyDenseMap {
 public:
  ToyDenseMap(std::size_t in, std::size_t hidden, std::size_t out, std::uint64_t seed);

  std::vector<double> forward(const std::vector<double>& v) const;
  /// d/dtheta of <forward(v), cot>.
  std::vector<double> param_grad(const std::vector<double>& v,
                                 const std::vector<double>& cot) const;

  std::size_t param_count() const { return params_.size(); }
  const std::vector<double>& parameters() const { return params_; }
  void set_parameters(const std::vector<double>& p);
  void add_scaled(const std::vector<double>& direction, double scale);

  std::size_t in_dim() const { return in_; }
  std::size_t out_dim() const { return out_; }

 private:
  std::size_t in_, hidden_, out_;
  std::vector<double> params_;  // [W1 (hidden x in), b1, W2 (out x hidden), b2]
};

/// Exactly enumerable Gibbs model p(r|x) = exp(-||phi(x) - psi(r)||^2 - log Z)
/// over signals of length n <= 10 with a quantized alphabet of size <= 3.
/// The only place the partition function is ever computed.
struct ToyGibbs {
  std::size_t n = 6;
  std::vector<double> alphabet = {-1.0, 0.0, 1.0};
  ToyDenseMap psi;
  ToyDenseMap phi;

  ToyGibbs(std::size_t n, std::vector<double> alphabet, std::size_t hidden,
           std::size_t features, std::size_t x_dim, std::uint64_t seed);

  std::size_t state_count() const;
  std::vector<double> state(std::size_t index) const;

  struct Table {
    std::vector<double> prob;    // normalized, sums to 1 up to rounding
    double log_z = 0.0;
    std::vector<double> phi_x;
  };
  Table enumerate(const std::vector<double>& x) const;

  /// -log p(r|x) = ||phi(x) - psi(r)||^2 + log Z.
  double nll(const Table& table, const std::vector<double>& r) const;

  /// Exact-distribution draw via the inverse CDF.
  std::vector<double> draw(const Table& table, Rng& rng) const;

  /// Exact enumerated gradients in the estimator convention (no factor 2):
  ///   psi: vjp(r) - E_p[vjp(r')],  vjp(u) = grad_theta 1/2||psi(u)-phi(x)||^2
  ///   phi: grad_theta <phi(x), E_p[psi(r')] - psi(r)>
  std::vector<double> exact_grad_psi(const Table& table, const std::vector<double>& x,
                                     const std::vector<double>& r) const;
  std::vector<double> exact_grad_phi(const Table& table, const std::vector<double>& x,
                                     const std::vector<double>& r) const;

  /// The sampling-based estimators with caller-provided negatives; identical
  /// formulas to the image-scale fine-tuner.
  std::vector<double> estimate_grad_psi(const std::vector<double>& x, const std::vector<double>& r,
                                        const std::vector<std::vector<double>>& negatives) const;
  std::vector<double> estimate_grad_phi(const std::vector<double>& x, const std::vector<double>& r,
                                        const std::vector<std::vector<double>>& negatives) const;
};

struct ToyFineTuneConfig {
  std::size_t steps = 200;
  std::size_t negatives = 8;  // L
  double phi_lr = 2e-3;
  double psi_lr = 2e-3;
  std::uint64_t seed = 0;
};

/// Alternating estimator-driven updates with exact-distribution negatives;
/// returns the enumerated NLL (mean over the dataset) before each step plus
/// the final value.
std::vector<double> finetune_toy(ToyGibbs& model,
                                 const std::vector<std::pair<std::vector<double>, std::vector<double>>>& data,
                                 const ToyFineTuneConfig& cfg);

}  // namespace ssr
