#include "ssr/filter_bank.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ssr/container.hpp"
#include "ssr/fft.hpp"

namespace ssr {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double gauss_aniso(double sigma, double slant, double v1, double v2) {
  return std::exp(-0.5 * sigma * sigma * (v1 * v1 + slant * slant * v2 * v2));
}

/// Signed grid frequency for bin index k of an N-point axis, in [-pi, pi).
double bin_freq(std::size_t k, std::size_t n) {
  const double kk = (k < n - n / 2) ? static_cast<double>(k)
                                    : static_cast<double>(k) - static_cast<double>(n);
  return kTwoPi * kk / static_cast<double>(n);
}

/// Periodized oriented Gabor: sum of the anisotropic Gaussian over +-2pi
/// aliases, centered at distance xi along orientation theta (xi = 0 gives the
/// plain envelope).
double periodized_gabor(double sigma, double slant, double cos_t, double sin_t,
                        double xi, double wx, double wy) {
  double acc = 0.0;
  for (int ky = -1; ky <= 1; ++ky) {
    for (int kx = -1; kx <= 1; ++kx) {
      const double ax = wx + kTwoPi * kx;
      const double ay = wy + kTwoPi * ky;
      const double v1 = ax * cos_t + ay * sin_t - xi;
      const double v2 = -ax * sin_t + ay * cos_t;
      acc += gauss_aniso(sigma, slant, v1, v2);
    }
  }
  return acc;
}

}  // namespace

ComplexGrid build_tv_filter(std::size_t height, std::size_t width) {
  // spatial kernels chosen so that (r * k)(u) = r(u + e) - r(u)
  Image dx(1, height, width);
  dx.at(0, 0, 0) += -1.0;
  dx.at(0, 0, width - 1) += 1.0;
  Image dy(1, height, width);
  dy.at(0, 0, 0) += -1.0;
  dy.at(0, height - 1, 0) += 1.0;

  const ComplexGrid dxf = fft2(dx);
  const ComplexGrid dyf = fft2(dy);
  ComplexGrid out(height, width);
  const std::complex<double> i_unit(0.0, 1.0);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out.data[k] = dxf.data[k] + i_unit * dyf.data[k];
  }
  return out;
}

FilterBank build_morlet_bank(std::size_t scales, std::size_t orientations,
                             std::size_t height, std::size_t width,
                             const MorletParams& params, bool include_tv) {
  if (scales < 1 || orientations < 1) {
    throw std::invalid_argument("build_morlet_bank: need J >= 1 and L >= 1");
  }
  const std::size_t pooled = std::size_t{1} << scales;
  if (pooled > std::min(height, width)) {
    throw std::invalid_argument("build_morlet_bank: 2^J exceeds image size");
  }

  FilterBank bank;
  bank.scales = scales;
  bank.orientations = orientations;
  bank.height = height;
  bank.width = width;
  bank.params = params;
  bank.has_tv = include_tv;

  // band-pass planes, DC removed exactly via the periodized envelope ratio
  bank.bandpass.reserve(scales * orientations);
  for (std::size_t j = 0; j < scales; ++j) {
    const double sigma = params.sigma0 * std::pow(2.0, static_cast<double>(j));
    const double xi = params.xi0 / std::pow(2.0, static_cast<double>(j));
    for (std::size_t t = 0; t < orientations; ++t) {
      const double theta = kTwoPi * static_cast<double>(t) / static_cast<double>(orientations);
      const double ct = std::cos(theta);
      const double st = std::sin(theta);
      const double beta = periodized_gabor(sigma, params.slant, ct, st, xi, 0.0, 0.0) /
                          periodized_gabor(sigma, params.slant, ct, st, 0.0, 0.0, 0.0);
      ComplexGrid plane(height, width);
      for (std::size_t y = 0; y < height; ++y) {
        const double wy = bin_freq(y, height);
        for (std::size_t x = 0; x < width; ++x) {
          const double wx = bin_freq(x, width);
          const double v = periodized_gabor(sigma, params.slant, ct, st, xi, wx, wy) -
                           beta * periodized_gabor(sigma, params.slant, ct, st, 0.0, wx, wy);
          plane.at(y, x) = v;
        }
      }
      bank.bandpass.push_back(std::move(plane));
    }
  }

  // Gaussian low-pass at scale 2^J, DC pinned to exactly one
  {
    const double sigma_low = params.lowpass_sigma_factor * static_cast<double>(pooled);
    ComplexGrid plane(height, width);
    for (std::size_t y = 0; y < height; ++y) {
      const double wy = bin_freq(y, height);
      for (std::size_t x = 0; x < width; ++x) {
        const double wx = bin_freq(x, width);
        plane.at(y, x) = periodized_gabor(sigma_low, 1.0, 1.0, 0.0, 0.0, wx, wy);
      }
    }
    const double dc = plane.at(0, 0).real();
    for (auto& v : plane.data) v /= dc;
    bank.lowpass = std::move(plane);
  }

  if (include_tv) {
    bank.tv = build_tv_filter(height, width);
    double peak = 0.0;
    for (const auto& v : bank.tv.data) peak = std::max(peak, std::abs(v));
    bank.tv_prescale = peak > 0.0 ? 1.0 / peak : 1.0;
    for (auto& v : bank.tv.data) v *= bank.tv_prescale;
  }

  // Frame normalization: largest s with max_w |phi|^2 + s^2 B(w) <= 1.
  {
    FilterBank probe = bank;  // energy map of the unscaled band-pass set
    probe.bandpass_scale = 1.0;
    const Image energy = littlewood_paley_map(probe);
    double s_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < energy.size(); ++i) {
      const double low = std::norm(bank.lowpass.data[i]);
      const double b = energy.data[i] - low;
      if (b > 1e-12) s_sq = std::min(s_sq, (1.0 - low) / b);
    }
    if (!std::isfinite(s_sq) || s_sq <= 0.0) s_sq = 1.0;
    const double s = std::sqrt(s_sq);
    for (auto& plane : bank.bandpass) {
      for (auto& v : plane.data) v *= s;
    }
    if (include_tv) {
      for (auto& v : bank.tv.data) v *= s;
    }
    bank.bandpass_scale = s;
  }
  return bank;
}

Image littlewood_paley_map(const FilterBank& bank) {
  const std::size_t h = bank.height, w = bank.width;
  Image energy(1, h, w);
  for (std::size_t i = 0; i < energy.size(); ++i) {
    energy.data[i] = std::norm(bank.lowpass.data[i]);
  }
  auto add_symmetrized = [&](const ComplexGrid& plane) {
    for (std::size_t y = 0; y < h; ++y) {
      const std::size_t yr = (h - y) % h;  // bin of -w
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t xr = (w - x) % w;
        energy.at(0, y, x) +=
            0.5 * (std::norm(plane.at(y, x)) + std::norm(plane.at(yr, xr)));
      }
    }
  };
  for (const auto& plane : bank.bandpass) add_symmetrized(plane);
  if (bank.has_tv) add_symmetrized(bank.tv);
  return energy;
}

std::pair<double, double> littlewood_paley(const FilterBank& bank) {
  const Image energy = littlewood_paley_map(bank);
  const double r_lo = kPi / std::pow(2.0, static_cast<double>(bank.scales));
  const double r_hi = kPi * 7.0 / 8.0;
  double min_e = std::numeric_limits<double>::infinity();
  double max_e = 0.0;
  for (std::size_t y = 0; y < bank.height; ++y) {
    const double wy = bin_freq(y, bank.height);
    for (std::size_t x = 0; x < bank.width; ++x) {
      const double wx = bin_freq(x, bank.width);
      const double e = energy.at(0, y, x);
      max_e = std::max(max_e, e);
      const double r = std::hypot(wx, wy);
      if (r >= r_lo && r <= r_hi) min_e = std::min(min_e, e);
    }
  }
  if (!std::isfinite(min_e)) min_e = 0.0;  // band empty on tiny grids
  return {min_e, max_e};
}

std::complex<double> morlet_analytic(const MorletParams& params, std::size_t orientations,
                                     std::size_t j, std::size_t theta,
                                     double omega_x, double omega_y,
                                     double bandpass_scale) {
  const double sigma = params.sigma0 * std::pow(2.0, static_cast<double>(j));
  const double xi = params.xi0 / std::pow(2.0, static_cast<double>(j));
  const double ang = kTwoPi * static_cast<double>(theta) / static_cast<double>(orientations);
  const double ct = std::cos(ang);
  const double st = std::sin(ang);
  const double v1 = omega_x * ct + omega_y * st;
  const double v2 = -omega_x * st + omega_y * ct;
  const double beta = std::exp(-0.5 * sigma * sigma * xi * xi);
  const double val = gauss_aniso(sigma, params.slant, v1 - xi, v2) -
                     beta * gauss_aniso(sigma, params.slant, v1, v2);
  return bandpass_scale * val;
}

void save_filter_bank(const FilterBank& bank, const std::string& path) {
  nlohmann::json meta;
  meta["format"] = "filter_bank";
  meta["schema_version"] = 1;
  meta["scales"] = bank.scales;
  meta["orientations"] = bank.orientations;
  meta["height"] = bank.height;
  meta["width"] = bank.width;
  meta["has_tv"] = bank.has_tv;
  meta["bandpass_scale"] = bank.bandpass_scale;
  meta["tv_prescale"] = bank.tv_prescale;
  meta["params"] = {{"xi0", bank.params.xi0},
                    {"sigma0", bank.params.sigma0},
                    {"slant", bank.params.slant},
                    {"lowpass_sigma_factor", bank.params.lowpass_sigma_factor}};

  Box box;
  box.put_text("meta", meta.dump(2));
  auto flatten = [](const ComplexGrid& g) {
    std::vector<double> v;
    v.reserve(g.size() * 2);
    for (const auto& z : g.data) {
      v.push_back(z.real());
      v.push_back(z.imag());
    }
    return v;
  };
  for (std::size_t j = 0; j < bank.scales; ++j) {
    for (std::size_t t = 0; t < bank.orientations; ++t) {
      std::ostringstream name;
      name << "psi_" << j << "_" << t;
      box.put_array(name.str(), flatten(bank.band(j, t)));
    }
  }
  box.put_array("phi", flatten(bank.lowpass));
  if (bank.has_tv) box.put_array("tv", flatten(bank.tv));
  box.save(path);
}

FilterBank load_filter_bank(const std::string& path) {
  const Box box = Box::load(path);
  const nlohmann::json meta = nlohmann::json::parse(box.text("meta"));
  if (meta.value("format", "") != "filter_bank") {
    throw std::runtime_error("load_filter_bank: '" + path + "' is not a filter bank");
  }
  FilterBank bank;
  bank.scales = meta.at("scales").get<std::size_t>();
  bank.orientations = meta.at("orientations").get<std::size_t>();
  bank.height = meta.at("height").get<std::size_t>();
  bank.width = meta.at("width").get<std::size_t>();
  bank.has_tv = meta.at("has_tv").get<bool>();
  bank.bandpass_scale = meta.at("bandpass_scale").get<double>();
  bank.tv_prescale = meta.at("tv_prescale").get<double>();
  const auto& p = meta.at("params");
  bank.params.xi0 = p.at("xi0").get<double>();
  bank.params.sigma0 = p.at("sigma0").get<double>();
  bank.params.slant = p.at("slant").get<double>();
  bank.params.lowpass_sigma_factor = p.at("lowpass_sigma_factor").get<double>();

  auto unflatten = [&](const std::vector<double>& v) {
    if (v.size() != bank.height * bank.width * 2) {
      throw std::runtime_error("load_filter_bank: bad plane size");
    }
    ComplexGrid g(bank.height, bank.width);
    for (std::size_t i = 0; i < g.size(); ++i) {
      g.data[i] = {v[2 * i], v[2 * i + 1]};
    }
    return g;
  };
  for (std::size_t j = 0; j < bank.scales; ++j) {
    for (std::size_t t = 0; t < bank.orientations; ++t) {
      std::ostringstream name;
      name << "psi_" << j << "_" << t;
      bank.bandpass.push_back(unflatten(box.array(name.str())));
    }
  }
  bank.lowpass = unflatten(box.array("phi"));
  if (bank.has_tv) bank.tv = unflatten(box.array("tv"));
  return bank;
}

}  // namespace ssr
