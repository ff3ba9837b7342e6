#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ssr {

/// Dense real-valued (channels, height, width) tensor, row-major within each
/// channel. Carries images, residuals and gradients; intensities of natural
/// images live in [0,1], residuals are unbounded.
struct Image {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Image() = default;
  Image(std::size_t c, std::size_t h, std::size_t w)
      : channels(c), height(h), width(w), data(c * h * w, 0.0) {}

  std::size_t size() const { return data.size(); }
  std::size_t plane_size() const { return height * width; }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data[(c * height + y) * width + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data[(c * height + y) * width + x];
  }

  const double* channel(std::size_t c) const { return data.data() + c * plane_size(); }
  double* channel(std::size_t c) { return data.data() + c * plane_size(); }

  bool same_shape(const Image& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }
};

/// Complex-valued (height, width) grid. Used both for frequency-domain filter
/// planes and for complex spatial fields produced by analytic filters.
struct ComplexGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::complex<double>> data;

  ComplexGrid() = default;
  ComplexGrid(std::size_t h, std::size_t w) : height(h), width(w), data(h * w) {}

  std::size_t size() const { return data.size(); }
  std::complex<double>& at(std::size_t y, std::size_t x) { return data[y * width + x]; }
  std::complex<double> at(std::size_t y, std::size_t x) const { return data[y * width + x]; }
};

// elementwise helpers; shapes must agree
void require_same_shape(const Image& a, const Image& b, const char* what);
void check_finite(const Image& img, const char* what);
bool all_finite(const Image& img);

Image operator+(const Image& a, const Image& b);
Image operator-(const Image& a, const Image& b);
Image operator*(double s, const Image& a);
void axpy(double alpha, const Image& x, Image& y);  // y += alpha * x

double dot(const Image& a, const Image& b);
double norm2(const Image& a);      // Euclidean norm
double sq_norm(const Image& a);    // squared Euclidean norm
double max_abs(const Image& a);
double mean(const Image& a);

/// Extract channel c as a 1-channel image.
Image take_channel(const Image& img, std::size_t c);

}  // namespace ssr
