#pragma once

#include <optional>
#include <string>

#include "ssr/filter_bank.hpp"
#include "ssr/predictor.hpp"
#include "ssr/scattering.hpp"

namespace ssr {

/// 64-bit fingerprint of the (scattering config, Morlet parameters) pairing a
/// predictor was trained against. Checked at inference time; independent of
/// the image size (banks are rebuilt per size).
std::string scattering_fingerprint(const ScatteringConfig& cfg, const MorletParams& params);

struct Checkpoint {
  PredictorNetwork net;
  std::string objective;  // "feature" or "pixel"
  ScatteringConfig scattering;     // meaningful for feature checkpoints
  MorletParams morlet;
  std::string fingerprint;         // scattering_fingerprint(scattering, morlet)
  std::optional<std::vector<double>> psi_parameters;  // fine-tuned filter planes
  std::size_t psi_plane_height = 0;
  std::size_t psi_plane_width = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace ssr
