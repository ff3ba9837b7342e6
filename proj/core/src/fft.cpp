#include "ssr/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace ssr {
namespace {

// FFTW plan creation is not thread-safe; plans are cached per (h, w, sign)
// and executed through the new-array interface. FFTW_UNALIGNED lets us run
// them on std::vector storage.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(std::size_t h, std::size_t w, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const Key key{h, w, sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> dummy(h * w);
    fftw_plan plan = fftw_plan_dft_2d(
        static_cast<int>(h), static_cast<int>(w),
        reinterpret_cast<fftw_complex*>(dummy.data()),
        reinterpret_cast<fftw_complex*>(dummy.data()), sign,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fft2: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  using Key = std::tuple<std::size_t, std::size_t, int>;
  std::mutex mu_;
  std::map<Key, fftw_plan> plans_;
};

void execute(const ComplexGrid& in, ComplexGrid& out, int sign) {
  fftw_plan plan = PlanCache::instance().get(in.height, in.width, sign);
  // out-of-place execution on caller buffers; plan was created UNALIGNED
  fftw_execute_dft(plan,
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data.data())),
                   reinterpret_cast<fftw_complex*>(out.data.data()));
}

}  // namespace

ComplexGrid fft2(const double* plane, std::size_t height, std::size_t width) {
  ComplexGrid in(height, width);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!std::isfinite(plane[i])) throw std::invalid_argument("fft2: non-finite input");
    in.data[i] = plane[i];
  }
  ComplexGrid out(height, width);
  execute(in, out, FFTW_FORWARD);
  return out;
}

ComplexGrid fft2(const Image& single_channel) {
  if (single_channel.channels != 1) throw std::invalid_argument("fft2: expected 1 channel");
  return fft2(single_channel.data.data(), single_channel.height, single_channel.width);
}

ComplexGrid fft2(const ComplexGrid& g) {
  ComplexGrid out(g.height, g.width);
  execute(g, out, FFTW_FORWARD);
  return out;
}

ComplexGrid ifft2(const ComplexGrid& g) {
  ComplexGrid out(g.height, g.width);
  execute(g, out, FFTW_BACKWARD);
  const double inv_n = 1.0 / static_cast<double>(g.size());
  for (auto& v : out.data) v *= inv_n;
  return out;
}

Image ifft2_real(const ComplexGrid& g) {
  ComplexGrid full = ifft2(g);
  Image out(1, g.height, g.width);
  for (std::size_t i = 0; i < full.size(); ++i) out.data[i] = full.data[i].real();
  return out;
}

static void require_filter_shape(std::size_t h, std::size_t w, const ComplexGrid& filter) {
  if (filter.height != h || filter.width != w) {
    throw std::invalid_argument("circular_convolve: filter plane shape mismatch");
  }
}

ComplexGrid circular_convolve(const Image& single_channel, const ComplexGrid& filter) {
  require_filter_shape(single_channel.height, single_channel.width, filter);
  ComplexGrid spec = fft2(single_channel);
  for (std::size_t i = 0; i < spec.size(); ++i) spec.data[i] *= filter.data[i];
  return ifft2(spec);
}

Image circular_convolve_real(const Image& single_channel, const ComplexGrid& filter) {
  require_filter_shape(single_channel.height, single_channel.width, filter);
  ComplexGrid spec = fft2(single_channel);
  for (std::size_t i = 0; i < spec.size(); ++i) spec.data[i] *= filter.data[i];
  return ifft2_real(spec);
}

ComplexGrid circular_convolve(const ComplexGrid& field, const ComplexGrid& filter) {
  require_filter_shape(field.height, field.width, filter);
  ComplexGrid spec = fft2(field);
  for (std::size_t i = 0; i < spec.size(); ++i) spec.data[i] *= filter.data[i];
  return ifft2(spec);
}

}  // namespace ssr
