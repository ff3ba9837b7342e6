#include "ssr/checkpoint.hpp"

#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ssr/container.hpp"

namespace ssr {
namespace {

nlohmann::json scattering_json(const ScatteringConfig& cfg, const MorletParams& params) {
  return {{"scales", cfg.scales},
          {"orientations", cfg.orientations},
          {"max_order", cfg.max_order},
          {"include_tv", cfg.include_tv},
          {"renorm_base", cfg.renorm_base},
          {"oversampling", cfg.oversampling},
          {"xi0", params.xi0},
          {"sigma0", params.sigma0},
          {"slant", params.slant},
          {"lowpass_sigma_factor", params.lowpass_sigma_factor}};
}

nlohmann::json layer_json(const LayerSpec& spec) {
  return {{"kind", static_cast<int>(spec.kind)},
          {"out_channels", spec.out_channels},
          {"kernel_h", spec.kernel_h},
          {"kernel_w", spec.kernel_w},
          {"stride", spec.stride},
          {"relu", spec.relu}};
}

LayerSpec layer_from_json(const nlohmann::json& j) {
  LayerSpec spec;
  spec.kind = static_cast<LayerSpec::Kind>(j.at("kind").get<int>());
  spec.out_channels = j.at("out_channels").get<std::size_t>();
  spec.kernel_h = j.at("kernel_h").get<std::size_t>();
  spec.kernel_w = j.at("kernel_w").get<std::size_t>();
  spec.stride = j.at("stride").get<unsigned>();
  spec.relu = j.at("relu").get<bool>();
  return spec;
}

}  // namespace

std::string scattering_fingerprint(const ScatteringConfig& cfg, const MorletParams& params) {
  const std::string canonical = scattering_json(cfg, params).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::json meta;
  meta["format"] = "checkpoint";
  meta["schema_version"] = 1;
  meta["objective"] = ckpt.objective;
  meta["input_channels"] = ckpt.net.input_channels();
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& spec : ckpt.net.layers()) layers.push_back(layer_json(spec));
  meta["layers"] = layers;
  meta["scattering"] = scattering_json(ckpt.scattering, ckpt.morlet);
  meta["fingerprint"] = scattering_fingerprint(ckpt.scattering, ckpt.morlet);
  meta["has_psi_parameters"] = ckpt.psi_parameters.has_value();
  meta["psi_plane_height"] = ckpt.psi_plane_height;
  meta["psi_plane_width"] = ckpt.psi_plane_width;

  Box box;
  box.put_text("meta", meta.dump(2));
  box.put_array("parameters", ckpt.net.parameters());
  if (ckpt.psi_parameters) box.put_array("psi_parameters", *ckpt.psi_parameters);
  box.save(path);
}

Checkpoint load_checkpoint(const std::string& path) {
  const Box box = Box::load(path);
  const nlohmann::json meta = nlohmann::json::parse(box.text("meta"));
  if (meta.value("format", "") != "checkpoint") {
    throw std::runtime_error("load_checkpoint: '" + path + "' is not a checkpoint");
  }
  Checkpoint ckpt;
  ckpt.objective = meta.at("objective").get<std::string>();
  std::vector<LayerSpec> layers;
  for (const auto& j : meta.at("layers")) layers.push_back(layer_from_json(j));
  ckpt.net = PredictorNetwork(std::move(layers), meta.at("input_channels").get<std::size_t>(), 0);
  ckpt.net.set_parameters(box.array("parameters"));

  const auto& sj = meta.at("scattering");
  ckpt.scattering.scales = sj.at("scales").get<std::size_t>();
  ckpt.scattering.orientations = sj.at("orientations").get<std::size_t>();
  ckpt.scattering.max_order = sj.at("max_order").get<unsigned>();
  ckpt.scattering.include_tv = sj.at("include_tv").get<bool>();
  ckpt.scattering.renorm_base = sj.at("renorm_base").get<double>();
  ckpt.scattering.oversampling = sj.at("oversampling").get<unsigned>();
  ckpt.morlet.xi0 = sj.at("xi0").get<double>();
  ckpt.morlet.sigma0 = sj.at("sigma0").get<double>();
  ckpt.morlet.slant = sj.at("slant").get<double>();
  ckpt.morlet.lowpass_sigma_factor = sj.at("lowpass_sigma_factor").get<double>();
  ckpt.fingerprint = meta.at("fingerprint").get<std::string>();

  if (meta.value("has_psi_parameters", false)) {
    ckpt.psi_parameters = box.array("psi_parameters");
    ckpt.psi_plane_height = meta.at("psi_plane_height").get<std::size_t>();
    ckpt.psi_plane_width = meta.at("psi_plane_width").get<std::size_t>();
  }
  return ckpt;
}

}  // namespace ssr
