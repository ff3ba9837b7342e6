#include "ssr/image.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ssr {

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch (" +
                                std::to_string(a.channels) + "x" + std::to_string(a.height) +
                                "x" + std::to_string(a.width) + " vs " +
                                std::to_string(b.channels) + "x" + std::to_string(b.height) +
                                "x" + std::to_string(b.width) + ")");
  }
}

bool all_finite(const Image& img) {
  for (double v : img.data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void check_finite(const Image& img, const char* what) {
  if (!all_finite(img)) {
    throw std::invalid_argument(std::string(what) + ": non-finite values");
  }
}

Image operator+(const Image& a, const Image& b) {
  require_same_shape(a, b, "operator+");
  Image out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

Image operator-(const Image& a, const Image& b) {
  require_same_shape(a, b, "operator-");
  Image out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

Image operator*(double s, const Image& a) {
  Image out = a;
  for (double& v : out.data) v *= s;
  return out;
}

void axpy(double alpha, const Image& x, Image& y) {
  require_same_shape(x, y, "axpy");
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += alpha * x.data[i];
}

double dot(const Image& a, const Image& b) {
  require_same_shape(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

double sq_norm(const Image& a) {
  double s = 0.0;
  for (double v : a.data) s += v * v;
  return s;
}

double norm2(const Image& a) { return std::sqrt(sq_norm(a)); }

double max_abs(const Image& a) {
  double m = 0.0;
  for (double v : a.data) m = std::max(m, std::abs(v));
  return m;
}

double mean(const Image& a) {
  if (a.data.empty()) return 0.0;
  double s = 0.0;
  for (double v : a.data) s += v;
  return s / static_cast<double>(a.data.size());
}

Image take_channel(const Image& img, std::size_t c) {
  if (c >= img.channels) throw std::invalid_argument("take_channel: channel out of range");
  Image out(1, img.height, img.width);
  const double* src = img.channel(c);
  for (std::size_t i = 0; i < out.plane_size(); ++i) out.data[i] = src[i];
  return out;
}

}  // namespace ssr
