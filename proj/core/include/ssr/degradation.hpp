#pragma once

#include <vector>

#include "ssr/image.hpp"

namespace ssr {

/// Forward operator U (anti-aliased decimation) and the linear predictor
/// U-bar (bicubic upsampling). Anti-alias filter: separable Hamming-windowed
/// sinc, 16*factor + 1 taps, cutoff 0.8*pi/factor, unit DC; stopband
/// attenuation beyond pi/factor exceeds 40 dB. Boundaries are circular
/// throughout.
struct DegradationModel {
  unsigned factor = 3;  // in {2, 3, 4}

  void validate() const;
  std::vector<double> antialias_taps() const;
};

/// Low-pass then decimate by the factor. Dimensions must be divisible.
Image downsample(const Image& y, const DegradationModel& model);

/// Bicubic (Keys a = -0.5) upsampling to the target grid; the best linear
/// predictor stand-in for the high-resolution image.
Image linear_predict(const Image& x, const DegradationModel& model);

/// r = y - linear_predict(x); y at full resolution, x at y/factor.
Image residual(const Image& y, const Image& x, const DegradationModel& model);

/// linear_predict(x) + r; exact inverse of residual in double precision.
Image reconstruct(const Image& x, const Image& r, const DegradationModel& model);

}  // namespace ssr
