#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ssr/filter_bank.hpp"
#include "ssr/image.hpp"

namespace ssr {

/// One output channel of the cascade. `scales`/`orientations` list the
/// band-pass filters applied in order (strictly increasing scales); an
/// orientation value equal to L denotes the total-variation channel at the
/// finest scale. The amplitude channel (pooled |r|, no band-pass) has empty
/// lists and order 1. order == number of modulus nonlinearities k.
struct ScatteringPath {
  unsigned order = 0;
  std::vector<std::size_t> scales;
  std::vector<std::size_t> orientations;
  bool amplitude = false;

  unsigned k() const { return order; }
  bool operator==(const ScatteringPath&) const = default;
};

struct ScatteringConfig {
  std::size_t scales = 3;        // J
  std::size_t orientations = 8;  // L
  unsigned max_order = 2;        // 1 or 2
  bool include_tv = true;
  double renorm_base = 1.25;     // c; channel of order k is scaled by c^k
  unsigned oversampling = 0;     // pooled stride = 2^(J - oversampling)

  std::size_t stride() const { return std::size_t{1} << (scales - oversampling); }
  void validate() const;
  bool operator==(const ScatteringConfig&) const = default;
};

/// Path-indexed feature maps at the pooled resolution; one channel per path,
/// same order as enumerate_paths.
struct ScatteringCoefficients {
  std::vector<ScatteringPath> paths;
  Image maps;
};

/// Deterministic path list: order 0 first; order 1 as [amplitude?], then
/// (scale, orientation) ascending with TV right after the finest-scale
/// orientations; order 2 lexicographic in (j1, t1, j2, t2) with j2 > j1.
///
/// Channel-count convention: enabling the TV channel also enables the pooled
/// amplitude channel |r|*phi, so J=3, L=8, order 2 with TV gives
/// 1 + (1 + 24 + 1) + 192 = 219 channels.
std::vector<ScatteringPath> enumerate_paths(const ScatteringConfig& cfg);
std::size_t path_count(const ScatteringConfig& cfg);

/// Human-readable description of the enumeration convention and per-order
/// counts (reported when a configured channel target is missed).
std::string enumeration_report(const ScatteringConfig& cfg);

/// Order-2 path count after reducing to J' = J - ceil(log2 alpha) effective
/// scales (no TV), the size guide for a downsampling factor alpha >= 1.
std::size_t effective_coefficients(std::size_t scales, std::size_t orientations, double alpha);

/// Forward cascade: order 0 is r*phi pooled, order 1 |r*psi|*phi, order 2
/// ||r*psi1|*psi2|*phi, plus the TV / amplitude channels; every channel of
/// order k is scaled by c^k. Input must be single-channel with dimensions
/// divisible by 2^J and equal to the bank's plane size.
ScatteringCoefficients scatter_forward(const Image& r, const FilterBank& bank,
                                       const ScatteringConfig& cfg);

struct ScatterLossGrad {
  double loss = 0.0;
  Image grad;
};

/// Gradient planes of the loss with respect to the filter planes, packed as
/// d/dRe + i d/dIm. Only the band-pass and TV planes are free parameters.
struct ScatterFilterGrads {
  std::vector<ComplexGrid> bandpass;
  ComplexGrid tv;
  bool has_tv = false;
};

/// loss = 1/2 || Psi(r) - target ||^2 and its exact input gradient
/// (modulus subgradient 0 at zeros below 1e-12).
ScatterLossGrad scatter_loss_grad(const Image& r, const ScatteringCoefficients& target,
                                  const FilterBank& bank, const ScatteringConfig& cfg);

/// Same with the target given as a raw channel stack (must match the path
/// count); optionally also accumulates filter-plane gradients.
ScatterLossGrad scatter_loss_grad_raw(const Image& r, const Image& target,
                                      const FilterBank& bank, const ScatteringConfig& cfg,
                                      ScatterFilterGrads* filter_grads = nullptr);

/// Multiply each channel by c^k (k = the path's nonlinearity count).
ScatteringCoefficients renormalize(const ScatteringCoefficients& coeffs, double c);

void save_coefficients(const ScatteringCoefficients& coeffs, const ScatteringConfig& cfg,
                       const std::string& path);
ScatteringCoefficients load_coefficients(const std::string& path, ScatteringConfig* cfg_out = nullptr);

}  // namespace ssr
