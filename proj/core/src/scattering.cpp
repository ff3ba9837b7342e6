#include "ssr/scattering.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ssr/container.hpp"
#include "ssr/fft.hpp"

namespace ssr {
namespace {

constexpr double kModulusEps = 1e-12;  // modulus subgradient is 0 below this

void check_bank_compat(const Image& r, const FilterBank& bank, const ScatteringConfig& cfg) {
  cfg.validate();
  if (r.channels != 1) throw std::invalid_argument("scattering: expected a single-channel image");
  if (r.height != bank.height || r.width != bank.width) {
    throw std::invalid_argument("scattering: image dimensions do not match the filter bank");
  }
  if (bank.scales != cfg.scales || bank.orientations != cfg.orientations) {
    throw std::invalid_argument("scattering: bank (J, L) does not match the config");
  }
  if (cfg.include_tv && !bank.has_tv) {
    throw std::invalid_argument("scattering: config includes the TV channel but the bank has none");
  }
  const std::size_t block = std::size_t{1} << cfg.scales;
  if (r.height % block != 0 || r.width % block != 0) {
    throw std::invalid_argument("scattering: image dimensions must be divisible by 2^J");
  }
}

// execution plan resolved from the enumerated path list
struct SecondStage {
  std::size_t j2 = 0, t2 = 0;
  std::size_t channel = 0;
};
struct Root {
  enum Kind { kMorlet, kTv, kAmp } kind = kMorlet;
  std::size_t j = 0, t = 0;
  std::size_t channel = 0;  // its order-1 output channel
  std::vector<SecondStage> seconds;
};
struct Plan {
  std::size_t order0_channel = 0;
  std::vector<Root> roots;
  std::size_t channels = 0;
};

Plan make_plan(const ScatteringConfig& cfg) {
  const auto paths = enumerate_paths(cfg);
  Plan plan;
  plan.channels = paths.size();
  std::vector<std::size_t> root_index(cfg.scales * (cfg.orientations + 1) + 1, SIZE_MAX);
  auto slot = [&](std::size_t j, std::size_t t) { return j * (cfg.orientations + 1) + t; };
  for (std::size_t ch = 0; ch < paths.size(); ++ch) {
    const auto& p = paths[ch];
    if (p.order == 0) {
      plan.order0_channel = ch;
    } else if (p.order == 1) {
      Root root;
      root.channel = ch;
      if (p.amplitude) {
        root.kind = Root::kAmp;
      } else if (p.orientations[0] == cfg.orientations) {
        root.kind = Root::kTv;
        root.j = p.scales[0];
      } else {
        root.kind = Root::kMorlet;
        root.j = p.scales[0];
        root.t = p.orientations[0];
        root_index[slot(root.j, root.t)] = plan.roots.size();
      }
      plan.roots.push_back(root);
    } else {
      const std::size_t ri = root_index[slot(p.scales[0], p.orientations[0])];
      plan.roots[ri].seconds.push_back({p.scales[1], p.orientations[1], ch});
    }
  }
  return plan;
}

void pool_into(double* dst, const ComplexGrid& u_spec, const ComplexGrid& phi,
               std::size_t stride, double scale) {
  ComplexGrid prod(u_spec.height, u_spec.width);
  for (std::size_t i = 0; i < prod.size(); ++i) prod.data[i] = u_spec.data[i] * phi.data[i];
  const Image full = ifft2_real(prod);
  const std::size_t gh = full.height / stride, gw = full.width / stride;
  for (std::size_t y = 0; y < gh; ++y) {
    for (std::size_t x = 0; x < gw; ++x) {
      dst[y * gw + x] = scale * full.at(0, y * stride, x * stride);
    }
  }
}

// adjoint of pool_into as a map from the pooled grid back to U (full res)
Image pool_adjoint(const double* g, std::size_t gh, std::size_t gw, std::size_t stride,
                   const ComplexGrid& phi, double scale) {
  Image stuffed(1, gh * stride, gw * stride);
  for (std::size_t y = 0; y < gh; ++y) {
    for (std::size_t x = 0; x < gw; ++x) {
      stuffed.at(0, y * stride, x * stride) = scale * g[y * gw + x];
    }
  }
  ComplexGrid spec = fft2(stuffed);
  for (std::size_t i = 0; i < spec.size(); ++i) spec.data[i] *= std::conj(phi.data[i]);
  return ifft2_real(spec);
}

ComplexGrid modulus_adjoint(const Image& du, const ComplexGrid& z) {
  ComplexGrid w(z.height, z.width);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double m = std::abs(z.data[i]);
    w.data[i] = (m < kModulusEps) ? 0.0 : du.data[i] * z.data[i] / m;
  }
  return w;
}

Image modulus(const ComplexGrid& z) {
  Image u(1, z.height, z.width);
  for (std::size_t i = 0; i < z.size(); ++i) u.data[i] = std::abs(z.data[i]);
  return u;
}

ComplexGrid multiply(const ComplexGrid& a, const ComplexGrid& b) {
  ComplexGrid out(a.height, a.width);
  for (std::size_t i = 0; i < a.size(); ++i) out.data[i] = a.data[i] * b.data[i];
  return out;
}

// accumulate (1/N) fft2(w) .* conj(src_spec) interpreted as d/dRe + i d/dIm
void accumulate_filter_grad(ComplexGrid& acc, const ComplexGrid& w_spec,
                            const ComplexGrid& src_spec) {
  const double inv_n = 1.0 / static_cast<double>(w_spec.size());
  if (acc.size() != w_spec.size()) acc = ComplexGrid(w_spec.height, w_spec.width);
  for (std::size_t i = 0; i < acc.size(); ++i) {
    acc.data[i] += inv_n * w_spec.data[i] * std::conj(src_spec.data[i]);
  }
}

}  // namespace

void ScatteringConfig::validate() const {
  if (scales < 1) throw std::invalid_argument("ScatteringConfig: J >= 1 required");
  if (orientations < 1) throw std::invalid_argument("ScatteringConfig: L >= 1 required");
  if (max_order < 1 || max_order > 2) throw std::invalid_argument("ScatteringConfig: max_order must be 1 or 2");
  if (oversampling > scales) throw std::invalid_argument("ScatteringConfig: oversampling exceeds J");
  if (!(renorm_base > 0.0)) throw std::invalid_argument("ScatteringConfig: renorm_base must be positive");
}

std::vector<ScatteringPath> enumerate_paths(const ScatteringConfig& cfg) {
  cfg.validate();
  std::vector<ScatteringPath> paths;
  paths.push_back({0, {}, {}, false});

  if (cfg.include_tv) {
    paths.push_back({1, {}, {}, true});  // pooled |r|
  }
  for (std::size_t j = 0; j < cfg.scales; ++j) {
    for (std::size_t t = 0; t < cfg.orientations; ++t) {
      paths.push_back({1, {j}, {t}, false});
    }
    if (j == 0 && cfg.include_tv) {
      paths.push_back({1, {0}, {cfg.orientations}, false});  // TV, last in the finest scale
    }
  }
  if (cfg.max_order >= 2) {
    for (std::size_t j1 = 0; j1 < cfg.scales; ++j1) {
      for (std::size_t t1 = 0; t1 < cfg.orientations; ++t1) {
        for (std::size_t j2 = j1 + 1; j2 < cfg.scales; ++j2) {
          for (std::size_t t2 = 0; t2 < cfg.orientations; ++t2) {
            paths.push_back({2, {j1, j2}, {t1, t2}, false});
          }
        }
      }
    }
  }
  return paths;
}

std::size_t path_count(const ScatteringConfig& cfg) {
  const std::size_t j = cfg.scales, l = cfg.orientations;
  std::size_t n = 1 + j * l + (cfg.include_tv ? 2 : 0);
  if (cfg.max_order >= 2) n += (j * (j - 1) / 2) * l * l;
  return n;
}

std::string enumeration_report(const ScatteringConfig& cfg) {
  const std::size_t j = cfg.scales, l = cfg.orientations;
  const std::size_t pairs = j * (j - 1) / 2;
  std::ostringstream os;
  os << "path enumeration (convention tv+amplitude): order0=1";
  os << ", order1=" << j * l << " oriented";
  if (cfg.include_tv) os << " + 1 tv + 1 amplitude";
  if (cfg.max_order >= 2) os << ", order2=" << pairs * l * l << " (" << pairs << " scale pairs x L^2)";
  os << ", total=" << path_count(cfg);
  return os.str();
}

std::size_t effective_coefficients(std::size_t scales, std::size_t orientations, double alpha) {
  if (alpha < 1.0) throw std::invalid_argument("effective_coefficients: alpha >= 1 required");
  const double lg = std::log2(alpha);
  const auto reduction = static_cast<std::size_t>(std::ceil(lg - 1e-12));
  if (reduction >= scales) throw std::invalid_argument("effective_coefficients: alpha too large for J");
  const std::size_t je = scales - reduction;
  return 1 + je * orientations + (je * (je - 1) / 2) * orientations * orientations;
}

ScatteringCoefficients renormalize(const ScatteringCoefficients& coeffs, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("renormalize: c must be positive");
  ScatteringCoefficients out = coeffs;
  for (std::size_t ch = 0; ch < out.paths.size(); ++ch) {
    const double f = std::pow(c, static_cast<double>(out.paths[ch].k()));
    double* plane = out.maps.channel(ch);
    for (std::size_t i = 0; i < out.maps.plane_size(); ++i) plane[i] *= f;
  }
  return out;
}

ScatteringCoefficients scatter_forward(const Image& r, const FilterBank& bank,
                                       const ScatteringConfig& cfg) {
  check_bank_compat(r, bank, cfg);
  const Plan plan = make_plan(cfg);
  const std::size_t stride = cfg.stride();
  const std::size_t gh = r.height / stride, gw = r.width / stride;
  const double c1 = cfg.renorm_base;
  const double c2 = c1 * c1;

  ScatteringCoefficients out;
  out.paths = enumerate_paths(cfg);
  out.maps = Image(plan.channels, gh, gw);

  const ComplexGrid r_spec = fft2(r);
  pool_into(out.maps.channel(plan.order0_channel), r_spec, bank.lowpass, stride, 1.0);

  for (const Root& root : plan.roots) {
    Image u1;
    if (root.kind == Root::kAmp) {
      u1 = Image(1, r.height, r.width);
      for (std::size_t i = 0; i < u1.size(); ++i) u1.data[i] = std::abs(r.data[i]);
    } else {
      const ComplexGrid& filt = (root.kind == Root::kTv) ? bank.tv : bank.band(root.j, root.t);
      u1 = modulus(ifft2(multiply(r_spec, filt)));
    }
    const ComplexGrid u1_spec = fft2(u1);
    pool_into(out.maps.channel(root.channel), u1_spec, bank.lowpass, stride, c1);
    for (const SecondStage& s : root.seconds) {
      const Image u2 = modulus(ifft2(multiply(u1_spec, bank.band(s.j2, s.t2))));
      pool_into(out.maps.channel(s.channel), fft2(u2), bank.lowpass, stride, c2);
    }
  }
  return out;
}

ScatterLossGrad scatter_loss_grad_raw(const Image& r, const Image& target,
                                      const FilterBank& bank, const ScatteringConfig& cfg,
                                      ScatterFilterGrads* filter_grads) {
  check_bank_compat(r, bank, cfg);
  const Plan plan = make_plan(cfg);
  if (target.channels != plan.channels) {
    throw std::invalid_argument("scatter_loss_grad: target channel count does not match the path set");
  }
  const std::size_t stride = cfg.stride();
  const std::size_t gh = r.height / stride, gw = r.width / stride;
  if (target.height != gh || target.width != gw) {
    throw std::invalid_argument("scatter_loss_grad: target grid does not match the pooled resolution");
  }
  const double c1 = cfg.renorm_base;
  const double c2 = c1 * c1;
  const std::size_t plane = gh * gw;

  if (filter_grads) {
    filter_grads->bandpass.assign(bank.bandpass.size(), ComplexGrid(r.height, r.width));
    filter_grads->has_tv = bank.has_tv;
    if (bank.has_tv) filter_grads->tv = ComplexGrid(r.height, r.width);
  }

  const ComplexGrid r_spec = fft2(r);
  double loss = 0.0;
  std::vector<double> cot(plane);  // d loss / d raw pooled channel

  std::vector<ComplexGrid> conj_bandpass(bank.bandpass.size());
  for (std::size_t i = 0; i < bank.bandpass.size(); ++i) {
    ComplexGrid c(r.height, r.width);
    for (std::size_t k = 0; k < c.size(); ++k) c.data[k] = std::conj(bank.bandpass[i].data[k]);
    conj_bandpass[i] = std::move(c);
  }

  // residual of one pooled channel; the c^k chain factor is folded into the
  // pool_adjoint scale, so `cot` holds the plain residual
  auto channel_cotangent = [&](std::size_t ch, const ComplexGrid& u_spec, double ck) {
    std::vector<double> out_ch(plane);
    pool_into(out_ch.data(), u_spec, bank.lowpass, stride, ck);
    const double* t = target.channel(ch);
    for (std::size_t i = 0; i < plane; ++i) {
      const double d = out_ch[i] - t[i];
      loss += 0.5 * d * d;
      cot[i] = d;
    }
  };

  ComplexGrid dr_spec(r.height, r.width);  // frequency-domain gradient accumulator
  Image dr_spatial(1, r.height, r.width);  // amplitude-channel contribution

  // order 0: linear chain, adjoint goes straight to the input spectrum
  channel_cotangent(plan.order0_channel, r_spec, 1.0);
  {
    const Image du = pool_adjoint(cot.data(), gh, gw, stride, bank.lowpass, 1.0);
    const ComplexGrid du_spec = fft2(du);
    for (std::size_t i = 0; i < dr_spec.size(); ++i) dr_spec.data[i] += du_spec.data[i];
  }

  for (const Root& root : plan.roots) {
    Image u1;
    ComplexGrid z1;
    const bool is_amp = root.kind == Root::kAmp;
    if (is_amp) {
      u1 = Image(1, r.height, r.width);
      for (std::size_t i = 0; i < u1.size(); ++i) u1.data[i] = std::abs(r.data[i]);
    } else {
      const ComplexGrid& filt = (root.kind == Root::kTv) ? bank.tv : bank.band(root.j, root.t);
      z1 = ifft2(multiply(r_spec, filt));
      u1 = modulus(z1);
    }
    const ComplexGrid u1_spec = fft2(u1);

    channel_cotangent(root.channel, u1_spec, c1);
    Image du1 = pool_adjoint(cot.data(), gh, gw, stride, bank.lowpass, c1);

    for (const SecondStage& s : root.seconds) {
      const ComplexGrid& filt2 = bank.band(s.j2, s.t2);
      const ComplexGrid z2 = ifft2(multiply(u1_spec, filt2));
      const Image u2 = modulus(z2);
      channel_cotangent(s.channel, fft2(u2), c2);
      const Image du2 = pool_adjoint(cot.data(), gh, gw, stride, bank.lowpass, c2);
      const ComplexGrid w2_spec = fft2(modulus_adjoint(du2, z2));
      if (filter_grads) {
        accumulate_filter_grad(filter_grads->bandpass[s.j2 * bank.orientations + s.t2],
                               w2_spec, u1_spec);
      }
      const ComplexGrid back =
          ifft2(multiply(w2_spec, conj_bandpass[s.j2 * bank.orientations + s.t2]));
      for (std::size_t i = 0; i < du1.size(); ++i) du1.data[i] += back.data[i].real();
    }

    if (is_amp) {
      for (std::size_t i = 0; i < dr_spatial.size(); ++i) {
        const double v = r.data[i];
        if (std::abs(v) >= kModulusEps) dr_spatial.data[i] += du1.data[i] * (v > 0.0 ? 1.0 : -1.0);
      }
    } else {
      const ComplexGrid& filt = (root.kind == Root::kTv) ? bank.tv : bank.band(root.j, root.t);
      const ComplexGrid w1_spec = fft2(modulus_adjoint(du1, z1));
      if (filter_grads) {
        if (root.kind == Root::kTv) {
          accumulate_filter_grad(filter_grads->tv, w1_spec, r_spec);
        } else {
          accumulate_filter_grad(filter_grads->bandpass[root.j * bank.orientations + root.t],
                                 w1_spec, r_spec);
        }
      }
      for (std::size_t i = 0; i < dr_spec.size(); ++i) {
        dr_spec.data[i] += w1_spec.data[i] * std::conj(filt.data[i]);
      }
    }
  }

  ScatterLossGrad result;
  result.loss = loss;
  result.grad = ifft2_real(dr_spec);
  for (std::size_t i = 0; i < result.grad.size(); ++i) result.grad.data[i] += dr_spatial.data[i];
  return result;
}

ScatterLossGrad scatter_loss_grad(const Image& r, const ScatteringCoefficients& target,
                                  const FilterBank& bank, const ScatteringConfig& cfg) {
  const auto paths = enumerate_paths(cfg);
  if (target.paths != paths) {
    throw std::invalid_argument("scatter_loss_grad: target path set does not match the config");
  }
  return scatter_loss_grad_raw(r, target.maps, bank, cfg, nullptr);
}

void save_coefficients(const ScatteringCoefficients& coeffs, const ScatteringConfig& cfg,
                       const std::string& path) {
  nlohmann::json meta;
  meta["format"] = "scattering_coefficients";
  meta["schema_version"] = 1;
  meta["convention"] = "tv+amplitude";
  meta["config"] = {{"scales", cfg.scales},
                    {"orientations", cfg.orientations},
                    {"max_order", cfg.max_order},
                    {"include_tv", cfg.include_tv},
                    {"renorm_base", cfg.renorm_base},
                    {"oversampling", cfg.oversampling}};
  meta["channels"] = coeffs.maps.channels;
  meta["grid_height"] = coeffs.maps.height;
  meta["grid_width"] = coeffs.maps.width;
  nlohmann::json jp = nlohmann::json::array();
  for (const auto& p : coeffs.paths) {
    jp.push_back({{"order", p.order},
                  {"scales", p.scales},
                  {"orientations", p.orientations},
                  {"amplitude", p.amplitude}});
  }
  meta["paths"] = jp;
  Box box;
  box.put_text("meta", meta.dump(2));
  box.put_array("maps", coeffs.maps.data);
  box.save(path);
}

ScatteringCoefficients load_coefficients(const std::string& path, ScatteringConfig* cfg_out) {
  const Box box = Box::load(path);
  const nlohmann::json meta = nlohmann::json::parse(box.text("meta"));
  if (meta.value("format", "") != "scattering_coefficients") {
    throw std::runtime_error("load_coefficients: '" + path + "' is not a coefficients file");
  }
  ScatteringCoefficients out;
  for (const auto& jp : meta.at("paths")) {
    ScatteringPath p;
    p.order = jp.at("order").get<unsigned>();
    p.scales = jp.at("scales").get<std::vector<std::size_t>>();
    p.orientations = jp.at("orientations").get<std::vector<std::size_t>>();
    p.amplitude = jp.at("amplitude").get<bool>();
    out.paths.push_back(std::move(p));
  }
  out.maps = Image(meta.at("channels").get<std::size_t>(),
                   meta.at("grid_height").get<std::size_t>(),
                   meta.at("grid_width").get<std::size_t>());
  const auto& data = box.array("maps");
  if (data.size() != out.maps.size()) throw std::runtime_error("load_coefficients: bad maps size");
  out.maps.data = data;
  if (cfg_out) {
    const auto& jc = meta.at("config");
    cfg_out->scales = jc.at("scales").get<std::size_t>();
    cfg_out->orientations = jc.at("orientations").get<std::size_t>();
    cfg_out->max_order = jc.at("max_order").get<unsigned>();
    cfg_out->include_tv = jc.at("include_tv").get<bool>();
    cfg_out->renorm_base = jc.at("renorm_base").get<double>();
    cfg_out->oversampling = jc.at("oversampling").get<unsigned>();
  }
  return out;
}

}  // namespace ssr
