#include "ssr/train.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ssr/rng.hpp"

namespace ssr {
namespace {

struct ItemGrad {
  std::vector<double> grad;
  double loss = 0.0;
};

ItemGrad item_gradient(const PredictorNetwork& net, const TrainSample& sample) {
  ItemGrad out;
  PredictorNetwork::Trace trace;
  const Image pred = net.forward_trace(sample.input, &trace);
  require_same_shape(pred, sample.target, "train: prediction vs target");
  Image cot = pred - sample.target;
  out.loss = 0.5 * sq_norm(cot);
  net.backward(trace, cot, &out.grad, nullptr);
  return out;
}

}  // namespace

Optimizer::Optimizer(TrainConfig::Optimizer kind, std::size_t n, double lr, double beta1,
                     double beta2, double eps)
    : kind_(kind), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (kind_ == TrainConfig::Optimizer::kAdam) {
    m_.assign(n, 0.0);
    v_.assign(n, 0.0);
  }
}

void Optimizer::step(const std::vector<double>& grad, std::vector<double>& delta) {
  delta.assign(grad.size(), 0.0);
  if (kind_ == TrainConfig::Optimizer::kSgd) {
    for (std::size_t i = 0; i < grad.size(); ++i) delta[i] = -lr_ * grad[i];
    return;
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < grad.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double mh = m_[i] / bc1;
    const double vh = v_[i] / bc2;
    delta[i] = -lr_ * mh / (std::sqrt(vh) + eps_);
  }
}

std::vector<TrainSample> prepare_samples(const std::vector<TrainPair>& pairs,
                                         const FeatureNetwork* psi,
                                         const DegradationModel& degradation,
                                         TrainConfig::Objective objective) {
  std::vector<TrainSample> samples;
  samples.reserve(pairs.size());
  for (const TrainPair& p : pairs) {
    TrainSample s;
    s.input = linear_predict(p.x, degradation);
    if (objective == TrainConfig::Objective::kFeatureRegression) {
      if (!psi) throw std::invalid_argument("prepare_samples: feature mode needs a feature network");
      s.target = psi->forward(p.target);
    } else {
      s.target = p.target;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

TrainResult train(PredictorNetwork& net, const std::vector<TrainSample>& data,
                  const TrainConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (!(cfg.lr >= 0.0)) throw std::invalid_argument("train: negative learning rate");
  const std::size_t batch = std::min(cfg.batch_size, data.size());

  Rng rng(cfg.seed ^ 0x7a2a1bULL);
  Optimizer opt(cfg.optimizer, net.param_count(), cfg.lr, cfg.beta1, cfg.beta2, cfg.eps);
  TrainResult result;
  result.loss_trace.reserve(cfg.steps);

  std::vector<double> grad(net.param_count());
  std::vector<double> delta;
  std::vector<std::size_t> picks(batch);
  std::vector<ItemGrad> items(batch);

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    for (std::size_t b = 0; b < batch; ++b) picks[b] = rng.below(data.size());

    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, batch));
    if (threads == 1) {
      for (std::size_t b = 0; b < batch; ++b) items[b] = item_gradient(net, data[picks[b]]);
    } else {
      std::vector<std::thread> pool;
      // static partition: item b handled by thread b % threads; results kept
      // per item so the reduction below stays ordered
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
          for (std::size_t b = t; b < batch; b += threads) {
            items[b] = item_gradient(net, data[picks[b]]);
          }
        });
      }
      for (auto& th : pool) th.join();
    }

    double loss = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t b = 0; b < batch; ++b) {  // ordered reduction
      loss += items[b].loss;
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += items[b].grad[i];
    }
    const double inv = 1.0 / static_cast<double>(batch);
    loss *= inv;
    for (double& g : grad) g *= inv;
    result.loss_trace.push_back(loss);

    if (!(loss < cfg.divergence_threshold)) {
      std::ostringstream os;
      os << "train: divergence at step " << step << " (loss " << loss << ", lr " << cfg.lr
         << ", batch " << batch << ")";
      throw std::runtime_error(os.str());
    }

    opt.step(grad, delta);
    net.add_scaled(delta, 1.0);
  }
  return result;
}

}  // namespace ssr
