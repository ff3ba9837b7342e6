#include "ssr/inference.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "ssr/rng.hpp"
#include "ssr/train.hpp"

namespace ssr {
namespace {

constexpr double kFlatEps = 1e-12;

Image make_init(const InferenceConfig& cfg, std::size_t h, std::size_t w, const Image* base) {
  Image r(1, h, w);
  Rng rng(cfg.seed ^ 0x1d1a5eedULL);
  switch (cfg.init) {
    case InferenceConfig::Init::kZeros:
      break;
    case InferenceConfig::Init::kLinearPredict:
      if (!base) throw std::invalid_argument("inference: linear-predict init needs a base image");
      r = *base;
      break;
    case InferenceConfig::Init::kGaussianNoise:
      for (double& v : r.data) v = cfg.init_sigma * rng.normal();
      break;
    case InferenceConfig::Init::kPerturbed:
      if (!base) throw std::invalid_argument("inference: perturbed init needs a base image");
      r = *base;
      for (double& v : r.data) v += cfg.init_sigma * rng.normal();
      break;
  }
  return r;
}

}  // namespace

void InferenceConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("InferenceConfig: iterations >= 1 required");
  if (!(lr > 0.0)) throw std::invalid_argument("InferenceConfig: step size must be positive");
  if (init_sigma < 0.0) throw std::invalid_argument("InferenceConfig: negative init sigma");
}

void GibbsModel::validate() const {
  degradation.validate();
  if (!psi) throw std::invalid_argument("GibbsModel: missing feature network");
  if (phi.output_channels() != psi->channels()) {
    throw std::invalid_argument("GibbsModel: predictor and feature network channel counts differ");
  }
  if (phi.total_stride() != psi->grid_stride()) {
    throw std::invalid_argument("GibbsModel: predictor and feature network grid strides differ");
  }
  if (lambda_tv < 0.0) throw std::invalid_argument("GibbsModel: negative lambda_tv");
}

double tv_norm(const Image& r) {
  double acc = 0.0;
  for (std::size_t c = 0; c < r.channels; ++c) {
    for (std::size_t y = 0; y < r.height; ++y) {
      for (std::size_t x = 0; x < r.width; ++x) {
        const double dx = r.at(c, y, (x + 1) % r.width) - r.at(c, y, x);
        const double dy = r.at(c, (y + 1) % r.height, x) - r.at(c, y, x);
        acc += std::hypot(dx, dy);
      }
    }
  }
  return acc;
}

Image tv_subgradient(const Image& r) {
  Image g(r.channels, r.height, r.width);
  for (std::size_t c = 0; c < r.channels; ++c) {
    for (std::size_t y = 0; y < r.height; ++y) {
      for (std::size_t x = 0; x < r.width; ++x) {
        const std::size_t xn = (x + 1) % r.width;
        const std::size_t yn = (y + 1) % r.height;
        const double dx = r.at(c, y, xn) - r.at(c, y, x);
        const double dy = r.at(c, yn, x) - r.at(c, y, x);
        const double m = std::hypot(dx, dy);
        if (m < kFlatEps) continue;
        g.at(c, y, xn) += dx / m;
        g.at(c, y, x) -= dx / m;
        g.at(c, yn, x) += dy / m;
        g.at(c, y, x) -= dy / m;
      }
    }
  }
  return g;
}

double gibbs_energy(const GibbsModel& model, const Image& x_features, const Image& r) {
  const Image feats = model.psi->forward(r);
  require_same_shape(feats, x_features, "gibbs_energy");
  return sq_norm(x_features - feats) + model.lambda_tv * tv_norm(r);
}

SampleResult sample_to_target(const FeatureNetwork& psi, const Image& target_features,
                              std::size_t height, std::size_t width, double lambda_tv,
                              const InferenceConfig& cfg, const Image* init_base) {
  cfg.validate();
  SampleResult result;
  Image r = make_init(cfg, height, width, init_base);

  Image best = r;
  double best_energy = std::numeric_limits<double>::infinity();

  auto energy_and_grad = [&](const Image& point, Image* grad) {
    // feature term of the Gibbs energy is the full squared norm: 2 * loss
    const FeatureLossGrad lg = psi.loss_grad(point, target_features);
    ++result.feature_evals;
    const double feat = 2.0 * lg.loss;
    const double tv = lambda_tv > 0.0 ? lambda_tv * tv_norm(point) : 0.0;
    if (grad) {
      *grad = 2.0 * lg.grad;
      if (lambda_tv > 0.0) axpy(lambda_tv, tv_subgradient(point), *grad);
    }
    return std::pair<double, double>{feat, tv};
  };

  if (cfg.optimizer == InferenceConfig::Optimizer::kAdam) {
    Optimizer adam(TrainConfig::Optimizer::kAdam, r.size(), 1.0, cfg.beta1, cfg.beta2, cfg.eps);
    std::vector<double> delta;
    Image grad;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
      const auto [feat, tv] = energy_and_grad(r, &grad);
      const double energy = feat + tv;
      if (!std::isfinite(energy)) throw std::runtime_error("sample_to_target: non-finite energy");
      result.trace.push_back({it, feat, tv});
      if (energy < best_energy) {
        best_energy = energy;
        best = r;
      }
      double lr = cfg.lr;
      if (10 * it >= 6 * cfg.iterations) lr *= cfg.lr_drop_factor;
      if (100 * it >= 86 * cfg.iterations) lr *= cfg.lr_drop_factor;
      adam.step(grad.data, delta);
      for (std::size_t i = 0; i < r.size(); ++i) r.data[i] += lr * delta[i];
    }
  } else {
    double step = cfg.lr;
    Image grad;
    auto [feat, tv] = energy_and_grad(r, &grad);
    double energy = feat + tv;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
      if (!std::isfinite(energy)) throw std::runtime_error("sample_to_target: non-finite energy");
      result.trace.push_back({it, feat, tv});
      if (energy < best_energy) {
        best_energy = energy;
        best = r;
      }
      // backtracking line search on the total energy
      bool accepted = false;
      for (int halvings = 0; halvings < 40; ++halvings) {
        Image candidate = r;
        axpy(-step, grad, candidate);
        Image cand_grad;
        const auto [cf, ct] = energy_and_grad(candidate, &cand_grad);
        if (cf + ct <= energy) {
          r = std::move(candidate);
          grad = std::move(cand_grad);
          feat = cf;
          tv = ct;
          energy = cf + ct;
          step *= 1.5;  // cautious growth after a success
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        // step underflow: remaining rows repeat the current energy
        for (std::size_t k = it + 1; k < cfg.iterations; ++k) result.trace.push_back({k, feat, tv});
        break;
      }
    }
    if (energy < best_energy) {
      best_energy = energy;
      best = r;
    }
  }

  result.sample = std::move(best);
  result.final_energy = best_energy;
  return result;
}

SampleResult sample_mode(const GibbsModel& model, const Image& x, const InferenceConfig& cfg) {
  model.validate();
  const Image up = linear_predict(x, model.degradation);
  const Image target = model.phi.forward(up);
  return sample_to_target(*model.psi, target, up.height, up.width, model.lambda_tv, cfg, &up);
}

std::vector<SampleResult> sample_isoprobability(const GibbsModel& model, const Image& x,
                                                std::size_t n, double sigma_perturb,
                                                const InferenceConfig& cfg) {
  if (n < 1) throw std::invalid_argument("sample_isoprobability: n >= 1 required");
  model.validate();
  const Image up = linear_predict(x, model.degradation);
  const Image target = model.phi.forward(up);

  std::vector<SampleResult> results;
  results.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    InferenceConfig run = cfg;
    run.init = InferenceConfig::Init::kPerturbed;
    run.init_sigma = sigma_perturb;
    run.seed = cfg.seed + k;
    results.push_back(
        sample_to_target(*model.psi, target, up.height, up.width, model.lambda_tv, run, &up));
  }
  return results;
}

Image super_resolve(const GibbsModel& model, const Image& x, const InferenceConfig& cfg,
                    SampleResult* details) {
  SampleResult res = sample_mode(model, x, cfg);
  const Image up = linear_predict(x, model.degradation);
  Image out = up + res.sample;
  if (details) *details = std::move(res);
  return out;
}

Image clamp_unit(const Image& img) {
  Image out = img;
  for (double& v : out.data) v = std::min(1.0, std::max(0.0, v));
  return out;
}

void write_energy_trace_csv(const std::vector<EnergyTraceRow>& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_energy_trace_csv: cannot open '" + path + "'");
  os << "iteration,feature_term,tv_term\n";
  os.precision(12);
  for (const auto& row : trace) {
    os << row.iteration << ',' << row.feature_term << ',' << row.tv_term << '\n';
  }
}

}  // namespace ssr
