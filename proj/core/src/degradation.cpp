#include "ssr/degradation.hpp"

#include <cmath>
#include <stdexcept>

namespace ssr {
namespace {

constexpr double kPi = 3.14159265358979323846;

/// Keys bicubic kernel, a = -0.5.
double keys_cubic(double t) {
  const double x = std::abs(t);
  if (x <= 1.0) return (1.5 * x - 2.5) * x * x + 1.0;
  if (x < 2.0) return ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0;
  return 0.0;
}

/// Circular 1-D convolution with centered taps along one axis of a plane.
void filter_axis(const double* in, double* out, std::size_t n, std::size_t count,
                 std::size_t stride, std::size_t jump, const std::vector<double>& taps) {
  const long m = static_cast<long>(taps.size() / 2);
  const long ln = static_cast<long>(n);
  for (std::size_t c = 0; c < count; ++c) {
    const double* src = in + c * jump;
    double* dst = out + c * jump;
    for (long i = 0; i < ln; ++i) {
      double acc = 0.0;
      for (long t = -m; t <= m; ++t) {
        long idx = (i - t) % ln;
        if (idx < 0) idx += ln;
        acc += taps[static_cast<std::size_t>(t + m)] * src[static_cast<std::size_t>(idx) * stride];
      }
      dst[static_cast<std::size_t>(i) * stride] = acc;
    }
  }
}

}  // namespace

void DegradationModel::validate() const {
  if (factor < 2 || factor > 4) {
    throw std::invalid_argument("DegradationModel: factor must be 2, 3 or 4");
  }
}

std::vector<double> DegradationModel::antialias_taps() const {
  validate();
  const std::size_t n = 16 * factor + 1;
  const long m = static_cast<long>(n / 2);
  const double cutoff = 0.8 * kPi / static_cast<double>(factor);
  std::vector<double> taps(n);
  double sum = 0.0;
  for (long i = -m; i <= m; ++i) {
    const double t = static_cast<double>(i);
    const double sinc = (i == 0) ? cutoff / kPi : std::sin(cutoff * t) / (kPi * t);
    const double window = 0.54 + 0.46 * std::cos(kPi * t / static_cast<double>(m));
    taps[static_cast<std::size_t>(i + m)] = sinc * window;
    sum += taps[static_cast<std::size_t>(i + m)];
  }
  for (double& v : taps) v /= sum;  // exact DC preservation
  return taps;
}

Image downsample(const Image& y, const DegradationModel& model) {
  model.validate();
  check_finite(y, "downsample");
  const unsigned a = model.factor;
  if (y.height % a != 0 || y.width % a != 0) {
    throw std::invalid_argument("downsample: dimensions not divisible by the factor");
  }
  const std::vector<double> taps = model.antialias_taps();

  Image filtered = y;
  Image tmp = y;
  for (std::size_t c = 0; c < y.channels; ++c) {
    // rows (along width), then columns (along height)
    filter_axis(y.channel(c), tmp.channel(c), y.width, y.height, 1, y.width, taps);
    filter_axis(tmp.channel(c), filtered.channel(c), y.height, y.width, y.width, 1, taps);
  }

  Image out(y.channels, y.height / a, y.width / a);
  for (std::size_t c = 0; c < y.channels; ++c) {
    for (std::size_t yy = 0; yy < out.height; ++yy) {
      for (std::size_t xx = 0; xx < out.width; ++xx) {
        out.at(c, yy, xx) = filtered.at(c, yy * a, xx * a);
      }
    }
  }
  return out;
}

Image linear_predict(const Image& x, const DegradationModel& model) {
  model.validate();
  check_finite(x, "linear_predict");
  const unsigned a = model.factor;
  const std::size_t oh = x.height * a, ow = x.width * a;
  Image out(x.channels, oh, ow);
  const long lh = static_cast<long>(x.height), lw = static_cast<long>(x.width);

  // fine position u samples the coarse grid at u / a
  for (std::size_t c = 0; c < x.channels; ++c) {
    // horizontal pass into a (h, ow) buffer, then vertical
    Image row_up(1, x.height, ow);
    for (std::size_t yy = 0; yy < x.height; ++yy) {
      for (std::size_t u = 0; u < ow; ++u) {
        const double s = static_cast<double>(u) / a;
        const long base = static_cast<long>(std::floor(s));
        double acc = 0.0;
        for (long k = base - 1; k <= base + 2; ++k) {
          long idx = k % lw;
          if (idx < 0) idx += lw;
          acc += x.at(c, yy, static_cast<std::size_t>(idx)) * keys_cubic(s - static_cast<double>(k));
        }
        row_up.at(0, yy, u) = acc;
      }
    }
    for (std::size_t u = 0; u < ow; ++u) {
      for (std::size_t v = 0; v < oh; ++v) {
        const double s = static_cast<double>(v) / a;
        const long base = static_cast<long>(std::floor(s));
        double acc = 0.0;
        for (long k = base - 1; k <= base + 2; ++k) {
          long idx = k % lh;
          if (idx < 0) idx += lh;
          acc += row_up.at(0, static_cast<std::size_t>(idx), u) * keys_cubic(s - static_cast<double>(k));
        }
        out.at(c, v, u) = acc;
      }
    }
  }
  return out;
}

Image residual(const Image& y, const Image& x, const DegradationModel& model) {
  model.validate();
  if (y.channels != x.channels || y.height != x.height * model.factor ||
      y.width != x.width * model.factor) {
    throw std::invalid_argument("residual: y must be x upscaled by the factor");
  }
  return y - linear_predict(x, model);
}

Image reconstruct(const Image& x, const Image& r, const DegradationModel& model) {
  Image up = linear_predict(x, model);
  require_same_shape(up, r, "reconstruct");
  return up + r;
}

}  // namespace ssr
