#pragma once

#include "ssr/image.hpp"

namespace ssr {

// 2-D DFT convention used throughout: forward transform is unnormalized,
// inverse divides by height*width. Parseval therefore reads
// ||x||^2 == ||fft2(x)||^2 / N.

/// Forward DFT of one real channel. Rejects non-finite input.
ComplexGrid fft2(const double* plane, std::size_t height, std::size_t width);
ComplexGrid fft2(const Image& single_channel);

/// Forward DFT of a complex grid.
ComplexGrid fft2(const ComplexGrid& g);

/// Inverse DFT (divides by N).
ComplexGrid ifft2(const ComplexGrid& g);

/// Inverse DFT keeping only the real part (for spectra that are numerically
/// conjugate-symmetric).
Image ifft2_real(const ComplexGrid& g);

/// Pointwise product in frequency then inverse transform: circular
/// (periodic) convolution of a single-channel image with a frequency-domain
/// filter. Complex output; analytic filters produce genuinely complex fields.
ComplexGrid circular_convolve(const Image& single_channel, const ComplexGrid& filter);

/// As above but keeping the real part (real symmetric filters).
Image circular_convolve_real(const Image& single_channel, const ComplexGrid& filter);

/// Complex-input variant used inside cascades.
ComplexGrid circular_convolve(const ComplexGrid& field, const ComplexGrid& filter);

}  // namespace ssr
