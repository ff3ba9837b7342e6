#pragma once

#include <functional>

#include "ssr/image.hpp"

namespace ssr {

/// Central-difference gradient (f(x+h e_i) - f(x-h e_i)) / 2h per coordinate.
/// Test oracle for every analytic gradient in the library. h must lie in
/// [1e-6, 1e-2]; f must be deterministic and finite.
Image finite_difference_grad(const std::function<double(const Image&)>& f,
                             const Image& x, double h);

/// Same but only for the listed flat coordinate indices (cheap spot checks on
/// large parameter vectors). Non-listed entries of the result are zero.
Image finite_difference_grad_at(const std::function<double(const Image&)>& f,
                                const Image& x, double h,
                                const std::vector<std::size_t>& coords);

}  // namespace ssr
