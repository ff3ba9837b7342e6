#pragma once

// Brute-force reference implementations used as test oracles. These must stay
// independent of the FFT-based code paths they check: transforms are direct
// O(N^2)-per-output summations.

#include <complex>
#include <vector>

#include "ssr/image.hpp"
#include "ssr/rng.hpp"

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Direct (unnormalized forward) 2-D DFT of a complex grid.
inline ssr::ComplexGrid direct_dft2(const ssr::ComplexGrid& in) {
  const std::size_t h = in.height, w = in.width;
  ssr::ComplexGrid out(h, w);
  for (std::size_t ky = 0; ky < h; ++ky) {
    for (std::size_t kx = 0; kx < w; ++kx) {
      std::complex<double> acc = 0.0;
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const double phase = -2.0 * kPi * (static_cast<double>(ky * y) / h +
                                             static_cast<double>(kx * x) / w);
          acc += in.at(y, x) * std::polar(1.0, phase);
        }
      }
      out.at(ky, kx) = acc;
    }
  }
  return out;
}

inline ssr::ComplexGrid direct_dft2(const ssr::Image& real_in) {
  ssr::ComplexGrid tmp(real_in.height, real_in.width);
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp.data[i] = real_in.data[i];
  return direct_dft2(tmp);
}

/// Circular spatial convolution of a real image with a complex kernel.
inline ssr::ComplexGrid spatial_circular_conv(const ssr::Image& img,
                                              const ssr::ComplexGrid& kernel) {
  const std::size_t h = img.height, w = img.width;
  ssr::ComplexGrid out(h, w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::complex<double> acc = 0.0;
      for (std::size_t vy = 0; vy < h; ++vy) {
        for (std::size_t vx = 0; vx < w; ++vx) {
          const std::size_t ky = (y + h - vy) % h;
          const std::size_t kx = (x + w - vx) % w;
          acc += img.at(0, vy, vx) * kernel.at(ky, kx);
        }
      }
      out.at(y, x) = acc;
    }
  }
  return out;
}

inline ssr::Image random_image(std::size_t c, std::size_t h, std::size_t w, ssr::Rng& rng,
                               double lo = 0.0, double hi = 1.0) {
  ssr::Image img(c, h, w);
  for (auto& v : img.data) v = rng.uniform(lo, hi);
  return img;
}

inline double max_abs_diff(const ssr::ComplexGrid& a, const ssr::ComplexGrid& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace oracle
