#include "ssr/grad_check.hpp"

#include <cmath>
#include <stdexcept>

namespace ssr {

static double eval_checked(const std::function<double(const Image&)>& f, const Image& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw std::runtime_error("finite_difference_grad: non-finite f value");
  return v;
}

Image finite_difference_grad(const std::function<double(const Image&)>& f,
                             const Image& x, double h) {
  std::vector<std::size_t> coords(x.size());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
  return finite_difference_grad_at(f, x, h, coords);
}

Image finite_difference_grad_at(const std::function<double(const Image&)>& f,
                                const Image& x, double h,
                                const std::vector<std::size_t>& coords) {
  if (h < 1e-6 || h > 1e-2) throw std::invalid_argument("finite_difference_grad: h out of [1e-6, 1e-2]");
  Image grad(x.channels, x.height, x.width);
  Image probe = x;
  for (std::size_t i : coords) {
    const double saved = probe.data[i];
    probe.data[i] = saved + h;
    const double fp = eval_checked(f, probe);
    probe.data[i] = saved - h;
    const double fm = eval_checked(f, probe);
    probe.data[i] = saved;
    grad.data[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace ssr
