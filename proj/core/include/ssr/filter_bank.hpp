#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ssr/image.hpp"

namespace ssr {

/// Mother-wavelet parameters. The frequency-domain form at scale j,
/// orientation theta is
///   g(sigma_j, R_{-theta} w - (xi_j, 0)) - beta * g(sigma_j, R_{-theta} w)
/// with g(s, v) = exp(-s^2 (v1^2 + slant^2 v2^2) / 2), sigma_j = sigma0 2^j,
/// xi_j = xi0 / 2^j and beta chosen so the DC response is exactly zero.
/// Orientations step 2pi/L around the full circle, so theta and theta + L/2
/// are reflections of each other through the frequency origin.
struct MorletParams {
  double xi0 = 2.356194490192344929;  // 3*pi/4 at the finest scale
  double sigma0 = 1.60;               // mother envelope spatial std
  double slant = 0.70;                // envelope anisotropy (1 = isotropic)
  double lowpass_sigma_factor = 0.45; // phi spatial std = factor * 2^J
};

/// Diagnostic floor for the Littlewood-Paley minimum over the retained band.
/// The dyadic near-analytic bank is not a tight frame; with the default
/// parameters the measured minimum is ~0.25, so the diagnostic threshold sits
/// at 0.2 with margin.
inline constexpr double kFrameEnergyFloor = 0.2;

/// Frequency-domain filter bank: J*L oriented band-pass planes, an optional
/// total-variation channel at the finest scale, and a Gaussian low-pass at
/// scale 2^J. Planes are periodized over +-2pi aliases, then the band-pass
/// set (TV included) is scaled so the Littlewood-Paley energy never exceeds
/// one. Immutable after construction.
struct FilterBank {
  std::size_t scales = 0;        // J
  std::size_t orientations = 0;  // L
  std::size_t height = 0;
  std::size_t width = 0;
  MorletParams params;

  std::vector<ComplexGrid> bandpass;  // index j * L + theta
  ComplexGrid lowpass;
  bool has_tv = false;
  ComplexGrid tv;

  double bandpass_scale = 1.0;  // frame normalization applied to band-pass + TV
  double tv_prescale = 1.0;     // unit-peak prescale applied to TV before that

  const ComplexGrid& band(std::size_t j, std::size_t theta) const {
    return bandpass[j * orientations + theta];
  }
};

/// Build the Morlet bank. Requires J >= 1, L >= 1 and 2^J <= min(h, w).
FilterBank build_morlet_bank(std::size_t scales, std::size_t orientations,
                             std::size_t height, std::size_t width,
                             const MorletParams& params = {},
                             bool include_tv = false);

/// Frequency response of psi_h = d/dx + i d/dy (forward differences, circular
/// wrap), built by transforming the two-tap spatial kernels. Exact and
/// unscaled; the bank stores a peak-normalized copy.
ComplexGrid build_tv_filter(std::size_t height, std::size_t width);

/// Pointwise Littlewood-Paley energy |phi^|^2 + 1/2 sum (|psi^(w)|^2 +
/// |psi^(-w)|^2) over all band-pass planes (TV included when present).
Image littlewood_paley_map(const FilterBank& bank);

/// (min over the retained band [pi/2^J, 7pi/8] of radii, max over the full
/// grid). The corners beyond the band are excluded from the min because the
/// near-analytic wavelets roll off there by design.
std::pair<double, double> littlewood_paley(const FilterBank& bank);

/// Analytic (unperiodized) mother value at a continuous frequency, including
/// the bank's normalization scale; reference for the dilation-consistency
/// check.
std::complex<double> morlet_analytic(const MorletParams& params, std::size_t orientations,
                                     std::size_t j, std::size_t theta,
                                     double omega_x, double omega_y,
                                     double bandpass_scale);

void save_filter_bank(const FilterBank& bank, const std::string& path);
FilterBank load_filter_bank(const std::string& path);

}  // namespace ssr
