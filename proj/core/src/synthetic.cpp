#include "ssr/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "ssr/fft.hpp"
#include "ssr/rng.hpp"

namespace ssr {
namespace {

constexpr double kPi = 3.14159265358979323846;

double bin_freq(std::size_t k, std::size_t n) {
  const double kk = (k < n - n / 2) ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(n);
  return 2.0 * kPi * kk / static_cast<double>(n);
}

/// Real random field with ~1/|w|^p amplitude spectrum.
Image spectral_field(std::size_t h, std::size_t w, double p, Rng& rng) {
  ComplexGrid spec(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    const double wy = bin_freq(y, h);
    for (std::size_t x = 0; x < w; ++x) {
      const double wx = bin_freq(x, w);
      const double r = std::hypot(wx, wy);
      const double amp = 1.0 / std::pow(0.15 + r, p);
      spec.at(y, x) = std::polar(amp, 2.0 * kPi * rng.uniform());
    }
  }
  spec.at(0, 0) = 0.0;
  // taking the real part of the inverse keeps the Hermitian component only
  return ifft2_real(spec);
}

void rescale_to_unit(Image& img) {
  double lo = img.data[0], hi = img.data[0];
  for (double v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = (hi > lo) ? hi - lo : 1.0;
  for (double& v : img.data) v = (v - lo) / span;
}

}  // namespace

Image synth_natural(std::size_t height, std::size_t width, std::uint64_t seed) {
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 1);
  Image img = spectral_field(height, width, 1.2, rng);
  rescale_to_unit(img);

  // a few smooth-edged disks and half-planes for geometric structure
  const int n_shapes = 3 + static_cast<int>(rng.below(3));
  for (int s = 0; s < n_shapes; ++s) {
    const double cx = rng.uniform() * static_cast<double>(width);
    const double cy = rng.uniform() * static_cast<double>(height);
    const double radius = (0.1 + 0.25 * rng.uniform()) * static_cast<double>(std::min(width, height));
    const double level = rng.uniform();
    const double blend = 0.4 + 0.4 * rng.uniform();
    const double edge = 0.8;  // soft edge width in pixels
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const double d = std::hypot(static_cast<double>(x) - cx, static_cast<double>(y) - cy);
        const double inside = 0.5 * (1.0 - std::tanh((d - radius) / edge));
        double& v = img.at(0, y, x);
        v = v * (1.0 - blend * inside) + level * blend * inside;
      }
    }
  }
  rescale_to_unit(img);
  return img;
}

Image synth_texture(std::size_t height, std::size_t width, std::uint64_t seed) {
  Rng rng(seed * 0xbf58476d1ce4e5b9ULL + 7);
  Image img(1, height, width);

  // sum of oriented band-limited noises; stationary by construction
  const int n_bands = 4;
  for (int b = 0; b < n_bands; ++b) {
    const double theta = 2.0 * kPi * rng.uniform();
    const double rho = 0.5 + 1.7 * rng.uniform();  // center radius in [0.5, 2.2]
    const double bw = 0.25 + 0.35 * rng.uniform();
    const double cx = rho * std::cos(theta), cy = rho * std::sin(theta);
    ComplexGrid spec(height, width);
    for (std::size_t y = 0; y < height; ++y) {
      const double wy = bin_freq(y, height);
      for (std::size_t x = 0; x < width; ++x) {
        const double wx = bin_freq(x, width);
        const double d2p = (wx - cx) * (wx - cx) + (wy - cy) * (wy - cy);
        const double d2m = (wx + cx) * (wx + cx) + (wy + cy) * (wy + cy);
        const double amp = std::exp(-d2p / (2 * bw * bw)) + std::exp(-d2m / (2 * bw * bw));
        spec.at(y, x) = std::polar(amp, 2.0 * kPi * rng.uniform());
      }
    }
    spec.at(0, 0) = 0.0;
    const Image band = ifft2_real(spec);
    const double weight = 0.5 + rng.uniform();
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] += weight * band.data[i];
  }
  rescale_to_unit(img);
  return img;
}

std::vector<Image> synth_corpus(std::size_t count, std::size_t height, std::size_t width,
                                std::uint64_t seed) {
  std::vector<Image> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back((i % 2 == 0) ? synth_natural(height, width, seed + i)
                               : synth_texture(height, width, seed + i));
  }
  return out;
}

}  // namespace ssr
