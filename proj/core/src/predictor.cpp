#include "ssr/predictor.hpp"

#include <cmath>
#include <stdexcept>

#include "ssr/rng.hpp"

namespace ssr {
namespace {

void conv_forward(const Image& in, Image& out, const std::vector<double>& w,
                  const std::vector<double>& b, std::size_t kh, std::size_t kw,
                  unsigned stride) {
  const long ih = static_cast<long>(in.height), iw = static_cast<long>(in.width);
  const long ph = static_cast<long>(kh / 2), pw = static_cast<long>(kw / 2);
  const std::size_t oc_n = out.channels, ic_n = in.channels;
  for (std::size_t oc = 0; oc < oc_n; ++oc) {
    double* out_plane = out.channel(oc);
    for (std::size_t oy = 0; oy < out.height; ++oy) {
      for (std::size_t ox = 0; ox < out.width; ++ox) {
        double acc = b[oc];
        const long cy = static_cast<long>(oy * stride) - ph;
        const long cx = static_cast<long>(ox * stride) - pw;
        for (std::size_t ic = 0; ic < ic_n; ++ic) {
          const double* in_plane = in.channel(ic);
          const double* wk = w.data() + ((oc * ic_n + ic) * kh) * kw;
          for (std::size_t ky = 0; ky < kh; ++ky) {
            const long iy = cy + static_cast<long>(ky);
            if (iy < 0 || iy >= ih) continue;
            const double* in_row = in_plane + iy * iw;
            const double* w_row = wk + ky * kw;
            for (std::size_t kx = 0; kx < kw; ++kx) {
              const long ix = cx + static_cast<long>(kx);
              if (ix < 0 || ix >= iw) continue;
              acc += w_row[kx] * in_row[ix];
            }
          }
        }
        out_plane[oy * out.width + ox] = acc;
      }
    }
  }
}

void conv_backward(const Image& in, const Image& cot, const std::vector<double>& w,
                   std::size_t kh, std::size_t kw, unsigned stride, double* dw, double* db,
                   Image* din) {
  const long ih = static_cast<long>(in.height), iw = static_cast<long>(in.width);
  const long ph = static_cast<long>(kh / 2), pw = static_cast<long>(kw / 2);
  const std::size_t oc_n = cot.channels, ic_n = in.channels;
  for (std::size_t oc = 0; oc < oc_n; ++oc) {
    const double* g_plane = cot.channel(oc);
    for (std::size_t oy = 0; oy < cot.height; ++oy) {
      for (std::size_t ox = 0; ox < cot.width; ++ox) {
        const double g = g_plane[oy * cot.width + ox];
        if (g == 0.0) continue;
        if (db) db[oc] += g;
        const long cy = static_cast<long>(oy * stride) - ph;
        const long cx = static_cast<long>(ox * stride) - pw;
        for (std::size_t ic = 0; ic < ic_n; ++ic) {
          const double* in_plane = in.channel(ic);
          double* din_plane = din ? din->channel(ic) : nullptr;
          const std::size_t w_base = ((oc * ic_n + ic) * kh) * kw;
          for (std::size_t ky = 0; ky < kh; ++ky) {
            const long iy = cy + static_cast<long>(ky);
            if (iy < 0 || iy >= ih) continue;
            for (std::size_t kx = 0; kx < kw; ++kx) {
              const long ix = cx + static_cast<long>(kx);
              if (ix < 0 || ix >= iw) continue;
              const std::size_t wi = w_base + ky * kw + kx;
              if (dw) dw[wi] += g * in_plane[iy * iw + ix];
              if (din_plane) din_plane[iy * iw + ix] += g * w[wi];
            }
          }
        }
      }
    }
  }
}

}  // namespace

PredictorNetwork::PredictorNetwork(std::vector<LayerSpec> layers, std::size_t input_channels,
                                   std::uint64_t seed)
    : layers_(std::move(layers)), input_channels_(input_channels) {
  Rng rng(seed ^ 0x5ca77e25ULL);
  std::size_t channels = input_channels_;
  for (const LayerSpec& spec : layers_) {
    LayerParams lp;
    if (spec.kind == LayerSpec::Kind::kConvolution || spec.kind == LayerSpec::Kind::kLinearOutput) {
      if (spec.out_channels == 0) throw std::invalid_argument("PredictorNetwork: out_channels == 0");
      if (spec.kernel_h % 2 == 0 || spec.kernel_w % 2 == 0) {
        throw std::invalid_argument("PredictorNetwork: kernels must be odd-sized");
      }
      if (spec.stride != 1 && spec.stride != 2) {
        throw std::invalid_argument("PredictorNetwork: stride must be 1 or 2");
      }
      lp.in_channels = channels;
      const std::size_t fan_in = channels * spec.kernel_h * spec.kernel_w;
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      lp.weights.resize(spec.out_channels * fan_in);
      for (double& v : lp.weights) v = rng.uniform(-bound, bound);
      lp.bias.assign(spec.out_channels, 0.0);
      channels = spec.out_channels;
      n_params_ += lp.weights.size() + lp.bias.size();
    } else if (spec.kind == LayerSpec::Kind::kDownsample) {
      if (spec.stride < 2) throw std::invalid_argument("PredictorNetwork: downsample stride must be >= 2");
    }
    params_.push_back(std::move(lp));
  }
}

std::size_t PredictorNetwork::output_channels() const {
  std::size_t channels = input_channels_;
  for (const LayerSpec& spec : layers_) {
    if (spec.kind == LayerSpec::Kind::kConvolution || spec.kind == LayerSpec::Kind::kLinearOutput) {
      channels = spec.out_channels;
    }
  }
  return channels;
}

std::size_t PredictorNetwork::total_stride() const {
  std::size_t s = 1;
  for (const LayerSpec& spec : layers_) {
    if (spec.kind == LayerSpec::Kind::kDownsample ||
        spec.kind == LayerSpec::Kind::kConvolution ||
        spec.kind == LayerSpec::Kind::kLinearOutput) {
      s *= spec.stride;
    }
  }
  return s;
}

Image PredictorNetwork::forward(const Image& x) const {
  Trace trace;
  return forward_trace(x, &trace);
}

Image PredictorNetwork::forward_trace(const Image& x, Trace* trace) const {
  if (x.channels != input_channels_) {
    throw std::invalid_argument("PredictorNetwork: wrong input channel count");
  }
  check_finite(x, "PredictorNetwork::forward");
  trace->acts.clear();
  trace->acts.push_back(x);
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const LayerSpec& spec = layers_[li];
    const Image& in = trace->acts.back();
    Image out;
    switch (spec.kind) {
      case LayerSpec::Kind::kConvolution:
      case LayerSpec::Kind::kLinearOutput: {
        if (in.height % spec.stride != 0 || in.width % spec.stride != 0) {
          throw std::invalid_argument("PredictorNetwork: input not divisible by stride");
        }
        out = Image(spec.out_channels, in.height / spec.stride, in.width / spec.stride);
        conv_forward(in, out, params_[li].weights, params_[li].bias, spec.kernel_h,
                     spec.kernel_w, spec.stride);
        if (spec.relu) {
          for (double& v : out.data) v = v > 0.0 ? v : 0.0;
        }
        break;
      }
      case LayerSpec::Kind::kPointwiseNonlinearity: {
        out = in;
        for (double& v : out.data) v = v > 0.0 ? v : 0.0;
        break;
      }
      case LayerSpec::Kind::kDownsample: {
        if (in.height % spec.stride != 0 || in.width % spec.stride != 0) {
          throw std::invalid_argument("PredictorNetwork: input not divisible by stride");
        }
        out = Image(in.channels, in.height / spec.stride, in.width / spec.stride);
        for (std::size_t c = 0; c < in.channels; ++c) {
          for (std::size_t y = 0; y < out.height; ++y) {
            for (std::size_t xx = 0; xx < out.width; ++xx) {
              out.at(c, y, xx) = in.at(c, y * spec.stride, xx * spec.stride);
            }
          }
        }
        break;
      }
    }
    trace->acts.push_back(std::move(out));
  }
  return trace->acts.back();
}

void PredictorNetwork::backward(const Trace& trace, const Image& out_cotangent,
                                std::vector<double>* param_grad, Image* input_grad) const {
  if (trace.acts.size() != layers_.size() + 1) {
    throw std::invalid_argument("PredictorNetwork::backward: trace does not match network");
  }
  if (param_grad) param_grad->assign(n_params_, 0.0);

  Image cot = out_cotangent;
  require_same_shape(cot, trace.acts.back(), "PredictorNetwork::backward");

  // offsets of each layer's parameters in the flat vector
  std::vector<std::size_t> offsets(layers_.size(), 0);
  {
    std::size_t off = 0;
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      offsets[li] = off;
      off += params_[li].weights.size() + params_[li].bias.size();
    }
  }

  for (std::size_t li = layers_.size(); li-- > 0;) {
    const LayerSpec& spec = layers_[li];
    const Image& in = trace.acts[li];
    const Image& out = trace.acts[li + 1];
    switch (spec.kind) {
      case LayerSpec::Kind::kConvolution:
      case LayerSpec::Kind::kLinearOutput: {
        if (spec.relu) {
          // out holds post-activation values; zero slope where clamped
          for (std::size_t i = 0; i < cot.data.size(); ++i) {
            if (out.data[i] <= 0.0) cot.data[i] = 0.0;
          }
        }
        Image din(in.channels, in.height, in.width);
        double* dw = nullptr;
        double* db = nullptr;
        if (param_grad) {
          dw = param_grad->data() + offsets[li];
          db = dw + params_[li].weights.size();
        }
        const bool need_din = input_grad != nullptr || li > 0;
        conv_backward(in, cot, params_[li].weights, spec.kernel_h, spec.kernel_w, spec.stride,
                      dw, db, need_din ? &din : nullptr);
        cot = std::move(din);
        break;
      }
      case LayerSpec::Kind::kPointwiseNonlinearity: {
        for (std::size_t i = 0; i < cot.data.size(); ++i) {
          if (out.data[i] <= 0.0) cot.data[i] = 0.0;
        }
        break;
      }
      case LayerSpec::Kind::kDownsample: {
        Image din(in.channels, in.height, in.width);
        for (std::size_t c = 0; c < out.channels; ++c) {
          for (std::size_t y = 0; y < out.height; ++y) {
            for (std::size_t xx = 0; xx < out.width; ++xx) {
              din.at(c, y * spec.stride, xx * spec.stride) = cot.at(c, y, xx);
            }
          }
        }
        cot = std::move(din);
        break;
      }
    }
  }
  if (input_grad) *input_grad = std::move(cot);
}

std::vector<double> PredictorNetwork::parameters() const {
  std::vector<double> flat;
  flat.reserve(n_params_);
  for (const auto& lp : params_) {
    flat.insert(flat.end(), lp.weights.begin(), lp.weights.end());
    flat.insert(flat.end(), lp.bias.begin(), lp.bias.end());
  }
  return flat;
}

void PredictorNetwork::set_parameters(const std::vector<double>& flat) {
  if (flat.size() != n_params_) throw std::invalid_argument("set_parameters: wrong size");
  std::size_t off = 0;
  for (auto& lp : params_) {
    for (double& v : lp.weights) v = flat[off++];
    for (double& v : lp.bias) v = flat[off++];
  }
}

void PredictorNetwork::add_scaled(const std::vector<double>& direction, double scale) {
  if (direction.size() != n_params_) throw std::invalid_argument("add_scaled: wrong size");
  std::size_t off = 0;
  for (auto& lp : params_) {
    for (double& v : lp.weights) v += scale * direction[off++];
    for (double& v : lp.bias) v += scale * direction[off++];
  }
}

PredictorNetwork build_phi_default(std::uint64_t seed, std::size_t feature_channels) {
  using K = LayerSpec::Kind;
  std::vector<LayerSpec> layers = {
      {K::kConvolution, 32, 9, 9, 1, true},
      {K::kConvolution, 64, 9, 9, 1, true},
      {K::kDownsample, 0, 1, 1, 2, false},
      {K::kConvolution, 64, 9, 9, 1, true},
      {K::kDownsample, 0, 1, 1, 2, false},
      {K::kConvolution, 64, 3, 3, 1, true},
      {K::kLinearOutput, feature_channels, 1, 1, 1, false},
  };
  return PredictorNetwork(std::move(layers), 1, seed);
}

PredictorNetwork build_baseline_default(std::uint64_t seed) {
  using K = LayerSpec::Kind;
  std::vector<LayerSpec> layers = {
      {K::kConvolution, 64, 7, 7, 1, true},
      {K::kConvolution, 64, 3, 3, 1, true},
      {K::kConvolution, 64, 3, 3, 1, true},
      {K::kConvolution, 32, 5, 5, 1, true},
      {K::kLinearOutput, 1, 1, 1, 1, false},
  };
  return PredictorNetwork(std::move(layers), 1, seed);
}

}  // namespace ssr
