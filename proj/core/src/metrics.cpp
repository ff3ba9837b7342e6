#include "ssr/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ssr/degradation.hpp"
#include "ssr/fft.hpp"

namespace ssr {
namespace {

constexpr double kPi = 3.14159265358979323846;

double bin_freq(std::size_t k, std::size_t n) {
  const double kk = (k < n - n / 2) ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(n);
  return 2.0 * kPi * kk / static_cast<double>(n);
}

}  // namespace

double psnr(const Image& a, const Image& b, double peak) {
  require_same_shape(a, b, "psnr");
  if (!(peak > 0.0)) throw std::invalid_argument("psnr: peak must be positive");
  const double mse = sq_norm(a - b) / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double relative_error(const Image& a, const Image& b) {
  require_same_shape(a, b, "relative_error");
  const double na = norm2(a);
  if (na == 0.0) throw std::invalid_argument("relative_error: reference has zero norm");
  return norm2(a - b) / na;
}

Image shift_image(const Image& img, long pixels, int axis) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("shift_image: axis must be 0 or 1");
  const long n = static_cast<long>(axis == 0 ? img.height : img.width);
  long k = pixels % n;
  if (k < 0) k += n;
  Image out(img.channels, img.height, img.width);
  for (std::size_t c = 0; c < img.channels; ++c) {
    for (std::size_t y = 0; y < img.height; ++y) {
      for (std::size_t x = 0; x < img.width; ++x) {
        const std::size_t sy = (axis == 0) ? (y + img.height - static_cast<std::size_t>(k)) % img.height : y;
        const std::size_t sx = (axis == 1) ? (x + img.width - static_cast<std::size_t>(k)) % img.width : x;
        out.at(c, y, x) = img.at(c, sy, sx);
      }
    }
  }
  return out;
}

Image gaussian_blur(const Image& img, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: sigma must be nonnegative");
  if (sigma == 0.0) return img;
  Image out(img.channels, img.height, img.width);
  ComplexGrid kernel(img.height, img.width);
  for (std::size_t y = 0; y < img.height; ++y) {
    const double wy = bin_freq(y, img.height);
    for (std::size_t x = 0; x < img.width; ++x) {
      const double wx = bin_freq(x, img.width);
      kernel.at(y, x) = std::exp(-0.5 * sigma * sigma * (wx * wx + wy * wy));
    }
  }
  for (std::size_t c = 0; c < img.channels; ++c) {
    const Image chan = take_channel(img, c);
    const Image blurred = circular_convolve_real(chan, kernel);
    for (std::size_t i = 0; i < blurred.plane_size(); ++i) out.channel(c)[i] = blurred.data[i];
  }
  return out;
}

StabilityCurve stability_curve(const std::vector<Image>& images, const FeatureNetwork& psi,
                               const std::string& kind, const std::vector<double>& grid) {
  if (images.empty()) throw std::invalid_argument("stability_curve: empty image list");
  if (kind != "shift" && kind != "blur") {
    throw std::invalid_argument("stability_curve: kind must be 'shift' or 'blur'");
  }
  StabilityCurve curve;
  curve.kind = kind;
  curve.severity = grid;
  curve.n_images = images.size();
  curve.pixel_rel_err.assign(grid.size(), 0.0);
  curve.feature_rel_err.assign(grid.size(), 0.0);

  for (const Image& img : images) {
    const Image feats = psi.forward(img);
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const double sev = grid[gi];
      Image degraded = (kind == "shift")
                           ? shift_image(img, static_cast<long>(std::llround(sev)), 1)
                           : gaussian_blur(img, sev);
      curve.pixel_rel_err[gi] += relative_error(img, degraded);
      curve.feature_rel_err[gi] += relative_error(feats, psi.forward(degraded));
    }
  }
  const double inv = 1.0 / static_cast<double>(images.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    curve.pixel_rel_err[gi] *= inv;
    curve.feature_rel_err[gi] *= inv;
  }
  return curve;
}

StabilityCurve sr_stability_curve(const std::vector<Image>& images, const FeatureNetwork& psi,
                                  const DegradationModel& degradation, const std::string& kind,
                                  const std::vector<double>& grid) {
  if (images.empty()) throw std::invalid_argument("sr_stability_curve: empty image list");
  if (kind != "shift" && kind != "blur") {
    throw std::invalid_argument("sr_stability_curve: kind must be 'shift' or 'blur'");
  }
  StabilityCurve curve;
  curve.kind = kind;
  curve.severity = grid;
  curve.n_images = images.size();
  curve.pixel_rel_err.assign(grid.size(), 0.0);
  curve.feature_rel_err.assign(grid.size(), 0.0);

  const auto resid = [&](const Image& y) { return residual(y, downsample(y, degradation), degradation); };

  for (const Image& img : images) {
    const Image feats = psi.forward(resid(img));
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
      const double sev = grid[gi];
      const Image degraded = (kind == "shift")
                                 ? shift_image(img, static_cast<long>(std::llround(sev)), 1)
                                 : gaussian_blur(img, sev);
      curve.pixel_rel_err[gi] += relative_error(img, degraded);
      curve.feature_rel_err[gi] += relative_error(feats, psi.forward(resid(degraded)));
    }
  }
  const double inv = 1.0 / static_cast<double>(images.size());
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    curve.pixel_rel_err[gi] *= inv;
    curve.feature_rel_err[gi] *= inv;
  }
  return curve;
}

void write_stability_csv(const StabilityCurve& curve, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_stability_csv: cannot open '" + path + "'");
  os << "kind,severity,pixel_rel_err,feature_rel_err,n_images\n";
  os.precision(12);
  for (std::size_t i = 0; i < curve.severity.size(); ++i) {
    os << curve.kind << ',' << curve.severity[i] << ',' << curve.pixel_rel_err[i] << ','
       << curve.feature_rel_err[i] << ',' << curve.n_images << '\n';
  }
}

}  // namespace ssr
