#include "ssr/toy_gibbs.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ssr {

ToyDenseMap::ToyDenseMap(std::size_t in, std::size_t hidden, std::size_t out, std::uint64_t seed)
    : in_(in), hidden_(hidden), out_(out) {
  params_.resize(hidden * in + hidden + out * hidden + out);
  Rng rng(seed ^ 0x70115eedULL);
  const double b1 = 1.0 / std::sqrt(static_cast<double>(in));
  const double b2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::size_t off = 0;
  for (std::size_t i = 0; i < hidden * in; ++i) params_[off++] = rng.uniform(-b1, b1);
  for (std::size_t i = 0; i < hidden; ++i) params_[off++] = 0.0;
  for (std::size_t i = 0; i < out * hidden; ++i) params_[off++] = rng.uniform(-b2, b2);
  for (std::size_t i = 0; i < out; ++i) params_[off++] = 0.0;
}

std::vector<double> ToyDenseMap::forward(const std::vector<double>& v) const {
  if (v.size() != in_) throw std::invalid_argument("ToyDenseMap: wrong input size");
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * in_;
  const double* w2 = b1 + hidden_;
  const double* b2 = w2 + out_ * hidden_;
  std::vector<double> h(hidden_);
  for (std::size_t j = 0; j < hidden_; ++j) {
    double acc = b1[j];
    for (std::size_t i = 0; i < in_; ++i) acc += w1[j * in_ + i] * v[i];
    h[j] = std::tanh(acc);
  }
  std::vector<double> out(out_);
  for (std::size_t k = 0; k < out_; ++k) {
    double acc = b2[k];
    for (std::size_t j = 0; j < hidden_; ++j) acc += w2[k * hidden_ + j] * h[j];
    out[k] = acc;
  }
  return out;
}

std::vector<double> ToyDenseMap::param_grad(const std::vector<double>& v,
                                            const std::vector<double>& cot) const {
  if (v.size() != in_ || cot.size() != out_) {
    throw std::invalid_argument("ToyDenseMap::param_grad: wrong sizes");
  }
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * in_;
  const double* w2 = b1 + hidden_;
  std::vector<double> pre(hidden_), h(hidden_);
  for (std::size_t j = 0; j < hidden_; ++j) {
    double acc = b1[j];
    for (std::size_t i = 0; i < in_; ++i) acc += w1[j * in_ + i] * v[i];
    pre[j] = acc;
    h[j] = std::tanh(acc);
  }
  std::vector<double> grad(params_.size(), 0.0);
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + hidden_ * in_;
  double* g_w2 = g_b1 + hidden_;
  double* g_b2 = g_w2 + out_ * hidden_;
  std::vector<double> dh(hidden_, 0.0);
  for (std::size_t k = 0; k < out_; ++k) {
    g_b2[k] = cot[k];
    for (std::size_t j = 0; j < hidden_; ++j) {
      g_w2[k * hidden_ + j] = cot[k] * h[j];
      dh[j] += cot[k] * w2[k * hidden_ + j];
    }
  }
  for (std::size_t j = 0; j < hidden_; ++j) {
    const double dpre = dh[j] * (1.0 - h[j] * h[j]);
    g_b1[j] = dpre;
    for (std::size_t i = 0; i < in_; ++i) g_w1[j * in_ + i] = dpre * v[i];
  }
  return grad;
}

void ToyDenseMap::set_parameters(const std::vector<double>& p) {
  if (p.size() != params_.size()) throw std::invalid_argument("ToyDenseMap: wrong size");
  params_ = p;
}

void ToyDenseMap::add_scaled(const std::vector<double>& direction, double scale) {
  if (direction.size() != params_.size()) throw std::invalid_argument("ToyDenseMap: wrong size");
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i] += scale * direction[i];
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

ToyGibbs::ToyGibbs(std::size_t n_, std::vector<double> alphabet_, std::size_t hidden,
                   std::size_t features, std::size_t x_dim, std::uint64_t seed)
    : n(n_),
      alphabet(std::move(alphabet_)),
      psi(n_, hidden, features, seed),
      phi(x_dim, hidden, features, seed ^ 0xabcdefULL) {
  if (n > 10) throw std::invalid_argument("ToyGibbs: n must be <= 10");
  if (alphabet.size() > 3 || alphabet.empty()) {
    throw std::invalid_argument("ToyGibbs: alphabet size must be in [1, 3]");
  }
}

std::size_t ToyGibbs::state_count() const {
  std::size_t c = 1;
  for (std::size_t i = 0; i < n; ++i) c *= alphabet.size();
  return c;
}

std::vector<double> ToyGibbs::state(std::size_t index) const {
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = alphabet[index % alphabet.size()];
    index /= alphabet.size();
  }
  return s;
}

ToyGibbs::Table ToyGibbs::enumerate(const std::vector<double>& x) const {
  Table table;
  table.phi_x = phi.forward(x);
  const std::size_t count = state_count();
  std::vector<double> energy(count);
  double min_e = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < count; ++s) {
    energy[s] = sq_dist(table.phi_x, psi.forward(state(s)));
    min_e = std::min(min_e, energy[s]);
  }
  table.prob.resize(count);
  double z_shifted = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    table.prob[s] = std::exp(-(energy[s] - min_e));
    z_shifted += table.prob[s];
  }
  for (double& p : table.prob) p /= z_shifted;
  table.log_z = std::log(z_shifted) - min_e;
  return table;
}

double ToyGibbs::nll(const Table& table, const std::vector<double>& r) const {
  return sq_dist(table.phi_x, psi.forward(r)) + table.log_z;
}

std::vector<double> ToyGibbs::draw(const Table& table, Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t s = 0; s < table.prob.size(); ++s) {
    acc += table.prob[s];
    if (u < acc) return state(s);
  }
  return state(table.prob.size() - 1);
}

namespace {

/// vjp(u) = grad_theta 1/2 || psi(u) - t ||^2.
std::vector<double> half_sq_vjp(const ToyDenseMap& psi, const std::vector<double>& u,
                                const std::vector<double>& t) {
  std::vector<double> feats = psi.forward(u);
  for (std::size_t i = 0; i < feats.size(); ++i) feats[i] -= t[i];
  return psi.param_grad(u, feats);
}

}  // namespace

std::vector<double> ToyGibbs::exact_grad_psi(const Table& table, const std::vector<double>& /*x*/,
                                             const std::vector<double>& r) const {
  std::vector<double> grad = half_sq_vjp(psi, r, table.phi_x);
  for (std::size_t s = 0; s < table.prob.size(); ++s) {
    if (table.prob[s] == 0.0) continue;
    const std::vector<double> g = half_sq_vjp(psi, state(s), table.phi_x);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= table.prob[s] * g[i];
  }
  return grad;
}

std::vector<double> ToyGibbs::exact_grad_phi(const Table& table, const std::vector<double>& x,
                                             const std::vector<double>& r) const {
  // cot = E_p[psi(r')] - psi(r)
  std::vector<double> cot(table.phi_x.size(), 0.0);
  for (std::size_t s = 0; s < table.prob.size(); ++s) {
    if (table.prob[s] == 0.0) continue;
    const std::vector<double> f = psi.forward(state(s));
    for (std::size_t i = 0; i < cot.size(); ++i) cot[i] += table.prob[s] * f[i];
  }
  const std::vector<double> fr = psi.forward(r);
  for (std::size_t i = 0; i < cot.size(); ++i) cot[i] -= fr[i];
  return phi.param_grad(x, cot);
}

std::vector<double> ToyGibbs::estimate_grad_psi(
    const std::vector<double>& x, const std::vector<double>& r,
    const std::vector<std::vector<double>>& negatives) const {
  if (negatives.empty()) throw std::invalid_argument("estimate_grad_psi: empty sample list");
  const std::vector<double> t = phi.forward(x);
  std::vector<double> grad = half_sq_vjp(psi, r, t);
  const double inv = 1.0 / static_cast<double>(negatives.size());
  for (const auto& neg : negatives) {
    const std::vector<double> g = half_sq_vjp(psi, neg, t);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] -= inv * g[i];
  }
  return grad;
}

std::vector<double> ToyGibbs::estimate_grad_phi(
    const std::vector<double>& x, const std::vector<double>& r,
    const std::vector<std::vector<double>>& negatives) const {
  if (negatives.empty()) throw std::invalid_argument("estimate_grad_phi: empty sample list");
  std::vector<double> cot(psi.out_dim(), 0.0);
  const double inv = 1.0 / static_cast<double>(negatives.size());
  for (const auto& neg : negatives) {
    const std::vector<double> f = psi.forward(neg);
    for (std::size_t i = 0; i < cot.size(); ++i) cot[i] += inv * f[i];
  }
  const std::vector<double> fr = psi.forward(r);
  for (std::size_t i = 0; i < cot.size(); ++i) cot[i] -= fr[i];
  return phi.param_grad(x, cot);
}

std::vector<double> finetune_toy(
    ToyGibbs& model,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& data,
    const ToyFineTuneConfig& cfg) {
  if (data.empty()) throw std::invalid_argument("finetune_toy: empty dataset");
  Rng rng(cfg.seed ^ 0x70fedULL);
  std::vector<double> nll_trace;
  nll_trace.reserve(cfg.steps + 1);

  auto mean_nll = [&]() {
    double acc = 0.0;
    for (const auto& [x, r] : data) acc += model.nll(model.enumerate(x), r);
    return acc / static_cast<double>(data.size());
  };

  for (std::size_t step = 0; step < cfg.steps; ++step) {
    nll_trace.push_back(mean_nll());
    const auto& [x, r] = data[step % data.size()];
    const ToyGibbs::Table table = model.enumerate(x);
    std::vector<std::vector<double>> negatives;
    negatives.reserve(cfg.negatives);
    for (std::size_t l = 0; l < cfg.negatives; ++l) negatives.push_back(model.draw(table, rng));

    const std::vector<double> g_phi = model.estimate_grad_phi(x, r, negatives);
    const std::vector<double> g_psi = model.estimate_grad_psi(x, r, negatives);
    model.phi.add_scaled(g_phi, -cfg.phi_lr);
    model.psi.add_scaled(g_psi, -cfg.psi_lr);
  }
  nll_trace.push_back(mean_nll());
  return nll_trace;
}

}  // namespace ssr
