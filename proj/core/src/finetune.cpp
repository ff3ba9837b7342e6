#include "ssr/finetune.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ssr {
namespace {

double vec_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void axpy_vec(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

GibbsModel FineTuneModel::gibbs() const {
  GibbsModel g;
  g.phi = phi;
  g.psi = psi;
  g.degradation = degradation;
  g.lambda_tv = lambda_tv;
  return g;
}

std::vector<double> grad_psi_estimate(const FineTuneModel& model, const Image& x, const Image& r,
                                      const std::vector<Image>& samples) {
  if (samples.empty()) throw std::invalid_argument("grad_psi_estimate: empty sample list");
  const Image up = linear_predict(x, model.degradation);
  const Image target = model.phi.forward(up);
  // vjp(u) = d/dtheta 1/2||Psi(u) - t||^2 = grad Psi(u)^T (Psi(u) - t)
  std::vector<double> grad = model.psi->param_grad(r, target);
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (const Image& neg : samples) {
    axpy_vec(-inv, model.psi->param_grad(neg, target), grad);
  }
  return grad;
}

std::vector<double> grad_phi_estimate(const FineTuneModel& model, const Image& x, const Image& r,
                                      const std::vector<Image>& samples) {
  if (samples.empty()) throw std::invalid_argument("grad_phi_estimate: empty sample list");
  const Image up = linear_predict(x, model.degradation);
  // cot = 1/L sum Psi(r') - Psi(r)
  Image cot = -1.0 * model.psi->forward(r);
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (const Image& neg : samples) {
    axpy(inv, model.psi->forward(neg), cot);
  }
  PredictorNetwork::Trace trace;
  model.phi.forward_trace(up, &trace);
  std::vector<double> grad;
  model.phi.backward(trace, cot, &grad, nullptr);
  return grad;
}

FineTuneResult finetune(FineTuneModel& model, const std::vector<TrainPair>& data,
                        const FineTuneConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("finetune: empty dataset");
  if (cfg.negatives < 1) throw std::invalid_argument("finetune: L >= 1 required");
  if (cfg.eta < 0.0 || cfg.eta > 1.0) throw std::invalid_argument("finetune: eta in [0, 1]");

  FineTuneResult result;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const TrainPair& datum = data[step % data.size()];

    InferenceConfig sampler = cfg.sampler;
    sampler.seed = cfg.seed + 0x9e37 * step;
    const std::vector<SampleResult> negatives_res =
        sample_isoprobability(model.gibbs(), datum.x, cfg.negatives, cfg.sigma_perturb, sampler);
    std::vector<Image> negatives;
    negatives.reserve(negatives_res.size());
    for (const auto& s : negatives_res) negatives.push_back(s.sample);

    const std::vector<double> g_phi = grad_phi_estimate(model, datum.x, datum.target, negatives);
    const std::vector<double> g_psi = grad_psi_estimate(model, datum.x, datum.target, negatives);

    // diagnostics at the pre-update parameters
    const Image up = linear_predict(datum.x, model.degradation);
    const Image target_feats = model.phi.forward(up);
    const double data_energy = sq_norm(target_feats - model.psi->forward(datum.target));
    double neg_energy = 0.0;
    for (const Image& neg : negatives) {
      neg_energy += sq_norm(target_feats - model.psi->forward(neg));
    }
    neg_energy /= static_cast<double>(negatives.size());

    FineTuneDiagnosticsRow row{step, data_energy, neg_energy, vec_norm(g_phi), vec_norm(g_psi)};
    result.rows.push_back(row);

    if (!std::isfinite(data_energy) || !std::isfinite(neg_energy) ||
        row.phi_grad_norm > cfg.divergence_norm || row.psi_grad_norm > cfg.divergence_norm) {
      std::ostringstream os;
      os << "finetune: divergence at step " << step << " (data energy " << data_energy
         << ", negative energy " << neg_energy << ", |g_phi| " << row.phi_grad_norm
         << ", |g_psi| " << row.psi_grad_norm << ")";
      throw std::runtime_error(os.str());
    }

    if (!cfg.dry_run) {
      model.phi.add_scaled(g_phi, -cfg.phi_lr);
      model.psi->add_scaled(g_psi, -cfg.psi_base_lr * cfg.eta);
    }
  }
  return result;
}

void write_finetune_csv(const FineTuneResult& result, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_finetune_csv: cannot open '" + path + "'");
  os << "step,data_energy,negative_energy,phi_grad_norm,psi_grad_norm\n";
  os.precision(12);
  for (const auto& row : result.rows) {
    os << row.step << ',' << row.data_energy << ',' << row.negative_energy << ','
       << row.phi_grad_norm << ',' << row.psi_grad_norm << '\n';
  }
}

}  // namespace ssr
