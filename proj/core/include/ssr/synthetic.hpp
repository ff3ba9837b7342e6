#pragma once

#include <cstdint>
#include <vector>

#include "ssr/image.hpp"

namespace ssr {

/// Deterministic natural-like test image: 1/f spectral field plus a few
/// smooth-edged shapes, normalized to [0, 1]. Single channel.
Image synth_natural(std::size_t height, std::size_t width, std::uint64_t seed);

/// Deterministic stationary texture with strong oriented high-frequency
/// content, in [0, 1]. Single channel.
Image synth_texture(std::size_t height, std::size_t width, std::uint64_t seed);

/// Mixed corpus (alternating natural / texture) for stability runs and
/// dataset construction.
std::vector<Image> synth_corpus(std::size_t count, std::size_t height, std::size_t width,
                                std::uint64_t seed);

}  // namespace ssr
