#pragma once

#include <string>
#include <vector>

#include "ssr/degradation.hpp"
#include "ssr/feature_network.hpp"
#include "ssr/image.hpp"

namespace ssr {

/// 10 log10(peak^2 / MSE); identical images return +infinity.
double psnr(const Image& a, const Image& b, double peak = 1.0);

/// ||a - b|| / ||a||.
double relative_error(const Image& a, const Image& b);

/// Circular integer shift; axis 0 moves rows (y), axis 1 moves columns (x).
Image shift_image(const Image& img, long pixels, int axis);

/// FFT-domain Gaussian blur with a unit-DC kernel; the image mean is
/// preserved exactly up to rounding.
Image gaussian_blur(const Image& img, double sigma);

struct StabilityCurve {
  std::string kind;  // "shift" or "blur"
  std::vector<double> severity;
  std::vector<double> pixel_rel_err;
  std::vector<double> feature_rel_err;
  std::size_t n_images = 0;
};

/// Average relative errors in pixel and feature domain over an image set, per
/// severity level. Shift severities are pixel counts (axis 1); blur
/// severities are Gaussian sigmas. Accumulation follows image order.
StabilityCurve stability_curve(const std::vector<Image>& images, const FeatureNetwork& psi,
                               const std::string& kind, const std::vector<double>& grid);

/// CSV schema: kind,severity,pixel_rel_err,feature_rel_err,n_images
void write_stability_csv(const StabilityCurve& curve, const std::string& path);

/// Super-resolution flavor of the experiment: deformations are applied to the
/// high-resolution images; the pixel column measures the Euclidean metric on
/// the signals while the feature column measures the model's metric, i.e. the
/// distance between the feature maps of the residuals the degraded signals
/// induce. This is the comparison between the two loss geometries.
StabilityCurve sr_stability_curve(const std::vector<Image>& images, const FeatureNetwork& psi,
                                  const DegradationModel& degradation, const std::string& kind,
                                  const std::vector<double>& grid);

}  // namespace ssr
