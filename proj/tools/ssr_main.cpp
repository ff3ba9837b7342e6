// Command-line front end: scattering runs, training, super-resolution,
// synthesis, fine-tuning and the stability experiment.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "ssr/checkpoint.hpp"
#include "ssr/dataio.hpp"
#include "ssr/finetune.hpp"
#include "ssr/inference.hpp"
#include "ssr/metrics.hpp"
#include "ssr/synthetic.hpp"
#include "ssr/train.hpp"
#include "ssr/trainable_scattering.hpp"

using nlohmann::json;
using namespace ssr;

namespace {

// exit codes: 0 ok, 2 config, 3 numeric divergence, 4 i/o
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  json raw;
  ScatteringConfig scattering;
  MorletParams morlet;
  DegradationModel degradation{2};
  double lambda_tv = 1e-8;

  TrainConfig train;
  InferenceConfig inference;
  FineTuneConfig finetune;

  // stability section
  std::vector<double> shift_grid = {1, 2, 3, 4};
  std::vector<double> blur_grid = {0.5, 1.0, 1.5, 2.0};
  std::size_t stability_crop = 64;
  bool stability_renormalized = true;

  // synthesize section
  double synth_init_sigma = 0.4;

  // corpus section
  std::size_t corpus_count = 12;
  std::size_t corpus_size = 96;
  std::size_t corpus_patch = 64;
  std::size_t corpus_cap = 2;
};

template <typename T>
T field(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + key + "': " + e.what());
  }
}

RunConfig parse_config(const std::string& path, std::uint64_t seed, unsigned threads) {
  RunConfig cfg;
  cfg.scattering.oversampling = 1;  // paired with the predictor's two stride-2 stages
  json j;
  if (!path.empty()) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path + "'");
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw ConfigError("config parse: " + std::string(e.what()));
    }
    if (field<int>(j, "schema_version", 1) != 1) {
      throw ConfigError("config: unsupported schema_version");
    }
  }
  cfg.raw = j;

  if (j.contains("scattering")) {
    const json& s = j["scattering"];
    cfg.scattering.scales = field<std::size_t>(s, "scales", cfg.scattering.scales);
    cfg.scattering.orientations = field<std::size_t>(s, "orientations", cfg.scattering.orientations);
    cfg.scattering.max_order = field<unsigned>(s, "max_order", cfg.scattering.max_order);
    cfg.scattering.include_tv = field<bool>(s, "include_tv", cfg.scattering.include_tv);
    cfg.scattering.renorm_base = field<double>(s, "renorm_base", cfg.scattering.renorm_base);
    cfg.scattering.oversampling = field<unsigned>(s, "oversampling", cfg.scattering.oversampling);
  }
  if (j.contains("morlet")) {
    const json& m = j["morlet"];
    cfg.morlet.xi0 = field<double>(m, "xi0", cfg.morlet.xi0);
    cfg.morlet.sigma0 = field<double>(m, "sigma0", cfg.morlet.sigma0);
    cfg.morlet.slant = field<double>(m, "slant", cfg.morlet.slant);
    cfg.morlet.lowpass_sigma_factor =
        field<double>(m, "lowpass_sigma_factor", cfg.morlet.lowpass_sigma_factor);
  }
  if (j.contains("degradation")) {
    cfg.degradation.factor = field<unsigned>(j["degradation"], "factor", cfg.degradation.factor);
  }
  cfg.lambda_tv = field<double>(j, "lambda_tv", cfg.lambda_tv);

  if (j.contains("train")) {
    const json& t = j["train"];
    const std::string obj = field<std::string>(t, "objective", "feature");
    if (obj == "feature") {
      cfg.train.objective = TrainConfig::Objective::kFeatureRegression;
    } else if (obj == "pixel") {
      cfg.train.objective = TrainConfig::Objective::kPixelRegression;
    } else {
      throw ConfigError("train.objective must be 'feature' or 'pixel'");
    }
    cfg.train.steps = field<std::size_t>(t, "steps", cfg.train.steps);
    cfg.train.batch_size = field<std::size_t>(t, "batch_size", cfg.train.batch_size);
    cfg.train.lr = field<double>(t, "lr", cfg.train.lr);
    const std::string opt = field<std::string>(t, "optimizer", "adam");
    if (opt == "adam") {
      cfg.train.optimizer = TrainConfig::Optimizer::kAdam;
    } else if (opt == "sgd") {
      cfg.train.optimizer = TrainConfig::Optimizer::kSgd;
    } else {
      throw ConfigError("train.optimizer must be 'adam' or 'sgd'");
    }
    cfg.train.patch = field<std::size_t>(t, "patch", cfg.train.patch);
  }
  if (j.contains("inference")) {
    const json& i = j["inference"];
    cfg.inference.iterations = field<std::size_t>(i, "iterations", cfg.inference.iterations);
    cfg.inference.lr = field<double>(i, "lr", cfg.inference.lr);
    const std::string opt = field<std::string>(i, "optimizer", "adam");
    if (opt == "adam") {
      cfg.inference.optimizer = InferenceConfig::Optimizer::kAdam;
    } else if (opt == "gd") {
      cfg.inference.optimizer = InferenceConfig::Optimizer::kGdBacktracking;
    } else {
      throw ConfigError("inference.optimizer must be 'adam' or 'gd'");
    }
    const std::string init = field<std::string>(i, "init", "linear-predict");
    if (init == "linear-predict") {
      cfg.inference.init = InferenceConfig::Init::kLinearPredict;
    } else if (init == "zeros") {
      cfg.inference.init = InferenceConfig::Init::kZeros;
    } else if (init == "gaussian-noise") {
      cfg.inference.init = InferenceConfig::Init::kGaussianNoise;
    } else if (init == "perturbed") {
      cfg.inference.init = InferenceConfig::Init::kPerturbed;
    } else {
      throw ConfigError("inference.init: unknown kind '" + init + "'");
    }
    cfg.inference.init_sigma = field<double>(i, "init_sigma", cfg.inference.init_sigma);
    cfg.inference.lr_drop_factor = field<double>(i, "lr_drop_factor", cfg.inference.lr_drop_factor);
  }
  if (j.contains("finetune")) {
    const json& f = j["finetune"];
    cfg.finetune.eta = field<double>(f, "eta", cfg.finetune.eta);
    cfg.finetune.negatives = field<std::size_t>(f, "negatives", cfg.finetune.negatives);
    cfg.finetune.sigma_perturb = field<double>(f, "sigma_perturb", cfg.finetune.sigma_perturb);
    cfg.finetune.phi_lr = field<double>(f, "phi_lr", cfg.finetune.phi_lr);
    cfg.finetune.psi_base_lr = field<double>(f, "psi_base_lr", cfg.finetune.psi_base_lr);
    cfg.finetune.steps = field<std::size_t>(f, "steps", cfg.finetune.steps);
    cfg.finetune.dry_run = field<bool>(f, "dry_run", cfg.finetune.dry_run);
    cfg.finetune.sampler.iterations =
        field<std::size_t>(f, "sampler_iterations", std::size_t{30});
  }
  if (j.contains("stability")) {
    const json& s = j["stability"];
    cfg.shift_grid = field<std::vector<double>>(s, "shift_grid", cfg.shift_grid);
    cfg.blur_grid = field<std::vector<double>>(s, "blur_grid", cfg.blur_grid);
    cfg.stability_crop = field<std::size_t>(s, "crop", cfg.stability_crop);
    cfg.stability_renormalized = field<bool>(s, "renormalized", cfg.stability_renormalized);
  }
  if (j.contains("synthesize")) {
    cfg.synth_init_sigma = field<double>(j["synthesize"], "init_sigma", cfg.synth_init_sigma);
  }
  if (j.contains("corpus")) {
    cfg.corpus_count = field<std::size_t>(j["corpus"], "count", cfg.corpus_count);
    cfg.corpus_size = field<std::size_t>(j["corpus"], "size", cfg.corpus_size);
    cfg.corpus_patch = field<std::size_t>(j["corpus"], "patch", cfg.corpus_patch);
    cfg.corpus_cap = field<std::size_t>(j["corpus"], "patches_per_image", cfg.corpus_cap);
  }

  cfg.train.seed = seed;
  cfg.train.threads = threads;
  cfg.inference.seed = seed;
  cfg.finetune.seed = seed;
  cfg.finetune.sampler.seed = seed;
  cfg.finetune.sampler.iterations =
      j.contains("finetune") ? cfg.finetune.sampler.iterations : std::size_t{30};

  try {
    cfg.scattering.validate();
    cfg.degradation.validate();
    cfg.inference.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

json resolved_json(const RunConfig& cfg, std::uint64_t seed, unsigned threads) {
  json j;
  j["schema_version"] = 1;
  j["seed"] = seed;
  j["threads"] = threads;
  j["scattering"] = {{"scales", cfg.scattering.scales},
                     {"orientations", cfg.scattering.orientations},
                     {"max_order", cfg.scattering.max_order},
                     {"include_tv", cfg.scattering.include_tv},
                     {"renorm_base", cfg.scattering.renorm_base},
                     {"oversampling", cfg.scattering.oversampling}};
  j["morlet"] = {{"xi0", cfg.morlet.xi0},
                 {"sigma0", cfg.morlet.sigma0},
                 {"slant", cfg.morlet.slant},
                 {"lowpass_sigma_factor", cfg.morlet.lowpass_sigma_factor}};
  j["degradation"] = {{"factor", cfg.degradation.factor}};
  j["lambda_tv"] = cfg.lambda_tv;
  j["fingerprint"] = scattering_fingerprint(cfg.scattering, cfg.morlet);
  return j;
}

void print_resolved(const RunConfig& cfg, std::uint64_t seed, unsigned threads) {
  std::cout << "resolved config: " << resolved_json(cfg, seed, threads).dump() << "\n";
}

Image load_luma(const std::string& path) {
  try {
    return luminance(load_image(path));
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

std::string trace_path_for(const std::string& output) { return output + ".trace.csv"; }

// ---------------------------------------------------------------- scatter --

int cmd_scatter(const std::string& image_path, const std::string& output, const RunConfig& cfg,
                std::uint64_t seed, unsigned threads) {
  print_resolved(cfg, seed, threads);
  const Image img = load_luma(image_path);
  const std::size_t block = std::size_t{1} << cfg.scattering.scales;
  if (img.height % block != 0 || img.width % block != 0) {
    throw ConfigError("image dimensions must be divisible by 2^J");
  }
  const FilterBank bank = build_morlet_bank(cfg.scattering.scales, cfg.scattering.orientations,
                                            img.height, img.width, cfg.morlet,
                                            cfg.scattering.include_tv);
  const ScatteringCoefficients coeffs = scatter_forward(img, bank, cfg.scattering);
  save_coefficients(coeffs, cfg.scattering, output);

  double order_energy[3] = {0.0, 0.0, 0.0};
  for (std::size_t ch = 0; ch < coeffs.paths.size(); ++ch) {
    double e = 0.0;
    for (std::size_t i = 0; i < coeffs.maps.plane_size(); ++i) {
      e += coeffs.maps.channel(ch)[i] * coeffs.maps.channel(ch)[i];
    }
    order_energy[coeffs.paths[ch].order] += e;
  }
  std::cout << "channels: " << coeffs.maps.channels << "\n";
  std::cout << "grid: " << coeffs.maps.height << "x" << coeffs.maps.width << "\n";
  std::cout << "energy by order: 0:" << order_energy[0] << " 1:" << order_energy[1]
            << " 2:" << order_energy[2] << "\n";
  std::cout << enumeration_report(cfg.scattering) << "\n";
  std::cout << "wrote " << output << "\n";
  return 0;
}

// ------------------------------------------------------------------ train --

int cmd_train(const std::string& manifest_path, const std::string& output, const RunConfig& cfg,
              std::uint64_t seed, unsigned threads, bool want_trace) {
  print_resolved(cfg, seed, threads);
  DatasetManifest manifest;
  try {
    manifest = load_manifest(manifest_path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }

  const bool feature_mode = cfg.train.objective == TrainConfig::Objective::kFeatureRegression;
  const std::size_t patch = manifest.patch_size;
  std::vector<PatchTriple> triples;
  try {
    triples = extract_patches(manifest, cfg.degradation,
                              feature_mode ? cfg.scattering.scales : std::size_t{0});
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  std::cout << "patches: " << triples.size() << " of " << patch << "x" << patch << "\n";

  PredictorNetwork net;
  std::shared_ptr<FeatureNetwork> psi;
  std::vector<TrainPair> pairs;
  pairs.reserve(triples.size());
  if (feature_mode) {
    FilterBank bank = build_morlet_bank(cfg.scattering.scales, cfg.scattering.orientations, patch,
                                        patch, cfg.morlet, cfg.scattering.include_tv);
    psi = std::make_shared<ScatteringNetwork>(std::move(bank), cfg.scattering);
    net = build_phi_default(seed, psi->channels());
    if (net.total_stride() != psi->grid_stride()) {
      throw ConfigError("predictor stride " + std::to_string(net.total_stride()) +
                        " does not match the scattering grid stride " +
                        std::to_string(psi->grid_stride()) +
                        "; adjust scattering.oversampling");
    }
    for (auto& t : triples) pairs.push_back({std::move(t.x), std::move(t.r)});
  } else {
    net = build_baseline_default(seed);
    for (auto& t : triples) pairs.push_back({std::move(t.x), std::move(t.y)});
  }

  const std::vector<TrainSample> samples =
      prepare_samples(pairs, psi.get(), cfg.degradation, cfg.train.objective);
  TrainResult result;
  try {
    result = train(net, samples, cfg.train);
  } catch (const std::runtime_error& e) {
    throw NumericError(e.what());
  }
  std::cout << "loss: " << result.loss_trace.front() << " -> " << result.loss_trace.back()
            << " over " << result.loss_trace.size() << " steps\n";

  Checkpoint ckpt;
  ckpt.net = std::move(net);
  ckpt.objective = feature_mode ? "feature" : "pixel";
  ckpt.scattering = cfg.scattering;
  ckpt.morlet = cfg.morlet;
  ckpt.fingerprint = scattering_fingerprint(cfg.scattering, cfg.morlet);
  save_checkpoint(ckpt, output);
  std::cout << "wrote " << output << "\n";

  if (want_trace) {
    std::ofstream os(trace_path_for(output));
    os << "step,loss\n";
    os.precision(12);
    for (std::size_t i = 0; i < result.loss_trace.size(); ++i) {
      os << i << ',' << result.loss_trace[i] << '\n';
    }
    std::cout << "wrote " << trace_path_for(output) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------- super-resolve --

GibbsModel model_from_checkpoint(const Checkpoint& ckpt, const RunConfig& cfg, std::size_t up_h,
                                 std::size_t up_w) {
  // the checkpoint's stored scattering pairing is authoritative; an explicit
  // scattering section in the runtime config must agree with it
  if (!cfg.raw.is_null() && cfg.raw.contains("scattering")) {
    const std::string want = scattering_fingerprint(cfg.scattering, cfg.morlet);
    if (want != ckpt.fingerprint) {
      throw ConfigError("checkpoint fingerprint " + ckpt.fingerprint +
                        " does not match the configured scattering setup " + want);
    }
  }
  FilterBank bank = build_morlet_bank(ckpt.scattering.scales, ckpt.scattering.orientations, up_h,
                                      up_w, ckpt.morlet, ckpt.scattering.include_tv);
  GibbsModel model;
  if (ckpt.psi_parameters) {
    if (ckpt.psi_plane_height != up_h || ckpt.psi_plane_width != up_w) {
      throw ConfigError("fine-tuned filter planes are " + std::to_string(ckpt.psi_plane_height) +
                        "x" + std::to_string(ckpt.psi_plane_width) +
                        "; this input would need " + std::to_string(up_h) + "x" +
                        std::to_string(up_w));
    }
    auto psi = std::make_shared<TrainableScattering>(std::move(bank), ckpt.scattering);
    psi->set_parameters(*ckpt.psi_parameters);
    model.psi = psi;
  } else {
    model.psi = std::make_shared<ScatteringNetwork>(std::move(bank), ckpt.scattering);
  }
  model.phi = ckpt.net;
  model.degradation = cfg.degradation;
  model.lambda_tv = cfg.lambda_tv;
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return model;
}

int cmd_super_resolve(const std::string& image_path, const std::string& ckpt_path,
                      const std::string& output, const std::string& residual_out,
                      const RunConfig& cfg, std::uint64_t seed, unsigned threads,
                      bool want_trace) {
  print_resolved(cfg, seed, threads);
  Checkpoint ckpt;
  try {
    ckpt = load_checkpoint(ckpt_path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }

  const Image input = load_image(image_path);
  const Image x = luminance(input);
  const unsigned a = cfg.degradation.factor;

  Image out_luma;
  Image residual_luma(1, x.height * a, x.width * a);
  if (ckpt.objective == "pixel") {
    // point estimate: one feed-forward pass on the upsampled input
    out_luma = ckpt.net.forward(linear_predict(x, cfg.degradation));
    residual_luma = out_luma - linear_predict(x, cfg.degradation);
  } else {
    const GibbsModel model = model_from_checkpoint(ckpt, cfg, x.height * a, x.width * a);
    SampleResult details;
    try {
      out_luma = super_resolve(model, x, cfg.inference, &details);
    } catch (const std::runtime_error& e) {
      throw NumericError(e.what());
    }
    residual_luma = details.sample;
    std::cout << "energy: " << (details.trace.front().feature_term + details.trace.front().tv_term)
              << " -> " << details.final_energy << " over " << details.trace.size()
              << " iterations (" << details.feature_evals << " feature passes)\n";
    if (want_trace) {
      write_energy_trace_csv(details.trace, trace_path_for(output));
      std::cout << "wrote " << trace_path_for(output) << "\n";
    }
  }

  Image display;
  if (input.channels == 3) {
    // luma through the model, chroma upsampled bicubically
    const Image ycbcr = rgb_to_ycbcr(input);
    Image up_cb = linear_predict(take_channel(ycbcr, 1), cfg.degradation);
    Image up_cr = linear_predict(take_channel(ycbcr, 2), cfg.degradation);
    Image merged(3, out_luma.height, out_luma.width);
    for (std::size_t i = 0; i < merged.plane_size(); ++i) {
      merged.channel(0)[i] = out_luma.data[i];
      merged.channel(1)[i] = up_cb.data[i];
      merged.channel(2)[i] = up_cr.data[i];
    }
    display = clamp_unit(ycbcr_to_rgb(merged));
  } else {
    display = clamp_unit(out_luma);
  }
  save_image(display, output);
  std::cout << "wrote " << output << " (" << display.height << "x" << display.width << ")\n";

  if (!residual_out.empty()) {
    save_image(residual_luma, residual_out);  // raw container keeps signed values
    std::cout << "wrote " << residual_out << "\n";
  }
  return 0;
}

// -------------------------------------------------------------- synthesize --

int cmd_synthesize(const std::string& target_path, const std::string& output,
                   const RunConfig& cfg, std::uint64_t seed, unsigned threads, bool want_trace) {
  print_resolved(cfg, seed, threads);

  ScatteringConfig scfg = cfg.scattering;
  Image target_maps;
  std::size_t h = 0, w = 0;
  bool is_coeffs = false;
  if (target_path.size() > 7 && target_path.ends_with(".ssrbox")) {
    try {
      ScatteringConfig stored;
      const ScatteringCoefficients coeffs = load_coefficients(target_path, &stored);
      scfg = stored;
      target_maps = coeffs.maps;
      h = coeffs.maps.height * stored.stride();
      w = coeffs.maps.width * stored.stride();
      is_coeffs = true;
    } catch (const std::runtime_error&) {
      is_coeffs = false;  // fall through to raw image loading
    }
  }

  FilterBank bank;
  std::shared_ptr<ScatteringNetwork> psi;
  if (!is_coeffs) {
    const Image target = load_luma(target_path);
    h = target.height;
    w = target.width;
    bank = build_morlet_bank(scfg.scales, scfg.orientations, h, w, cfg.morlet, scfg.include_tv);
    psi = std::make_shared<ScatteringNetwork>(std::move(bank), scfg);
    target_maps = psi->forward(target);
  } else {
    bank = build_morlet_bank(scfg.scales, scfg.orientations, h, w, cfg.morlet, scfg.include_tv);
    psi = std::make_shared<ScatteringNetwork>(std::move(bank), scfg);
  }

  InferenceConfig icfg = cfg.inference;
  icfg.init = InferenceConfig::Init::kGaussianNoise;
  icfg.init_sigma = cfg.synth_init_sigma;
  icfg.seed = seed;
  if (!cfg.raw.contains("inference")) {
    // synthesis defaults calibrated on the convergence experiment
    icfg.iterations = 500;
    icfg.lr = 0.1;
    icfg.lr_drop_factor = 0.3;
  }

  SampleResult res;
  try {
    res = sample_to_target(*psi, target_maps, h, w, cfg.lambda_tv, icfg);
  } catch (const std::runtime_error& e) {
    throw NumericError(e.what());
  }
  const double initial = res.trace.front().feature_term;
  const double final_err = sq_norm(psi->forward(res.sample) - target_maps);
  std::cout << "feature error: " << std::sqrt(initial) << " -> " << std::sqrt(final_err)
            << " over " << res.trace.size() << " iterations\n";

  save_image(res.sample, output);
  std::cout << "wrote " << output << "\n";
  if (want_trace) {
    write_energy_trace_csv(res.trace, trace_path_for(output));
    std::cout << "wrote " << trace_path_for(output) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- finetune --

int cmd_finetune(const std::string& ckpt_path, const std::string& manifest_path,
                 const std::string& output, const RunConfig& cfg, std::uint64_t seed,
                 unsigned threads, bool want_trace) {
  print_resolved(cfg, seed, threads);
  Checkpoint ckpt;
  DatasetManifest manifest;
  try {
    ckpt = load_checkpoint(ckpt_path);
    manifest = load_manifest(manifest_path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
  if (ckpt.objective != "feature") {
    throw ConfigError("finetune needs a feature-regression checkpoint");
  }

  std::vector<PatchTriple> triples;
  try {
    triples = extract_patches(manifest, cfg.degradation, ckpt.scattering.scales);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::size_t patch = manifest.patch_size;

  FilterBank bank = build_morlet_bank(ckpt.scattering.scales, ckpt.scattering.orientations, patch,
                                      patch, ckpt.morlet, ckpt.scattering.include_tv);
  FineTuneModel model;
  model.psi = std::make_shared<TrainableScattering>(std::move(bank), ckpt.scattering);
  if (ckpt.psi_parameters) {
    if (ckpt.psi_plane_height != patch || ckpt.psi_plane_width != patch) {
      throw ConfigError("checkpoint filter planes do not match the patch size");
    }
    model.psi->set_parameters(*ckpt.psi_parameters);
  }
  model.phi = std::move(ckpt.net);
  model.degradation = cfg.degradation;
  model.lambda_tv = cfg.lambda_tv;

  std::vector<TrainPair> data;
  data.reserve(triples.size());
  for (auto& t : triples) data.push_back({std::move(t.x), std::move(t.r)});

  FineTuneResult result;
  try {
    result = finetune(model, data, cfg.finetune);
  } catch (const std::runtime_error& e) {
    throw NumericError(e.what());
  }
  if (!result.rows.empty()) {
    std::cout << "data energy: " << result.rows.front().data_energy << " -> "
              << result.rows.back().data_energy << "\n";
    std::cout << "negative energy: " << result.rows.front().negative_energy << " -> "
              << result.rows.back().negative_energy << "\n";
  }

  Checkpoint out;
  out.net = std::move(model.phi);
  out.objective = "feature";
  out.scattering = ckpt.scattering;
  out.morlet = ckpt.morlet;
  out.fingerprint = ckpt.fingerprint;
  out.psi_parameters = model.psi->parameters();
  out.psi_plane_height = patch;
  out.psi_plane_width = patch;
  save_checkpoint(out, output);
  std::cout << "wrote " << output << "\n";

  if (want_trace) {
    write_finetune_csv(result, trace_path_for(output));
    std::cout << "wrote " << trace_path_for(output) << "\n";
  }
  return 0;
}

// ---------------------------------------------------------- eval-stability --

int cmd_eval_stability(const std::string& folder, const std::string& output, const RunConfig& cfg,
                       std::uint64_t seed, unsigned threads) {
  print_resolved(cfg, seed, threads);
  std::vector<std::string> paths;
  try {
    for (const auto& entry : std::filesystem::directory_iterator(folder)) {
      const std::string p = entry.path().string();
      if (p.ends_with(".pgm") || p.ends_with(".ppm") || p.ends_with(".ssrbox")) paths.push_back(p);
    }
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(e.what());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw IoError("no images found in '" + folder + "'");

  const std::size_t crop = cfg.stability_crop;
  std::vector<Image> images;
  for (const auto& p : paths) {
    const Image full = load_luma(p);
    if (full.height < crop || full.width < crop) {
      throw ConfigError("image '" + p + "' smaller than the stability crop");
    }
    Image c(1, crop, crop);
    const std::size_t y0 = (full.height - crop) / 2, x0 = (full.width - crop) / 2;
    for (std::size_t y = 0; y < crop; ++y) {
      for (std::size_t x = 0; x < crop; ++x) c.at(0, y, x) = full.at(0, y0 + y, x0 + x);
    }
    images.push_back(std::move(c));
  }
  std::cout << "images: " << images.size() << " (" << crop << "x" << crop << " center crops)\n";

  ScatteringConfig scfg = cfg.scattering;
  if (!cfg.stability_renormalized) scfg.renorm_base = 1.0;
  FilterBank bank =
      build_morlet_bank(scfg.scales, scfg.orientations, crop, crop, cfg.morlet, scfg.include_tv);
  const ScatteringNetwork psi(std::move(bank), scfg);

  const StabilityCurve shift =
      sr_stability_curve(images, psi, cfg.degradation, "shift", cfg.shift_grid);
  const StabilityCurve blur =
      sr_stability_curve(images, psi, cfg.degradation, "blur", cfg.blur_grid);

  std::ofstream os(output);
  if (!os) throw IoError("cannot open '" + output + "'");
  os << "kind,severity,pixel_rel_err,feature_rel_err,n_images\n";
  os.precision(12);
  for (const StabilityCurve* c : {&shift, &blur}) {
    for (std::size_t i = 0; i < c->severity.size(); ++i) {
      os << c->kind << ',' << c->severity[i] << ',' << c->pixel_rel_err[i] << ','
         << c->feature_rel_err[i] << ',' << c->n_images << '\n';
    }
  }
  std::cout << "wrote " << output << "\n";
  for (std::size_t i = 0; i < shift.severity.size(); ++i) {
    std::cout << "shift " << shift.severity[i] << ": pixel " << shift.pixel_rel_err[i]
              << " feature " << shift.feature_rel_err[i]
              << (shift.feature_rel_err[i] < shift.pixel_rel_err[i] ? "  (stable)" : "  (!)")
              << "\n";
  }
  for (std::size_t i = 0; i < blur.severity.size(); ++i) {
    std::cout << "blur " << blur.severity[i] << ": pixel " << blur.pixel_rel_err[i] << " feature "
              << blur.feature_rel_err[i]
              << (blur.feature_rel_err[i] > blur.pixel_rel_err[i] ? "  (sensitive)" : "  (!)")
              << "\n";
  }
  return 0;
}

// ------------------------------------------------------------- make-corpus --

int cmd_make_corpus(const std::string& folder, const RunConfig& cfg, std::uint64_t seed,
                    unsigned threads) {
  print_resolved(cfg, seed, threads);
  std::filesystem::create_directories(folder);
  std::vector<std::string> paths;
  for (std::size_t i = 0; i < cfg.corpus_count; ++i) {
    const Image img = (i % 2 == 0) ? synth_natural(cfg.corpus_size, cfg.corpus_size, seed + i)
                                   : synth_texture(cfg.corpus_size, cfg.corpus_size, seed + i);
    const std::string path = folder + "/img_" + std::to_string(i) + ".pgm";
    save_image(img, path);
    paths.push_back(path);
  }
  const DatasetManifest manifest = build_manifest(paths, cfg.corpus_patch, cfg.corpus_cap, seed);
  save_manifest(manifest, folder + "/manifest.json");
  std::cout << "wrote " << cfg.corpus_count << " images and " << folder << "/manifest.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conditional Gibbs super-resolution with scattering sufficient statistics"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand

  std::string config_path, output, image_path, ckpt_path, manifest_path, folder, residual_out;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool want_trace = false;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--threads", threads, "worker threads for the documented parallel paths");
  app.add_flag("--trace", want_trace, "emit CSV traces next to the output");

  auto* scatter = app.add_subcommand("scatter", "scattering coefficients of an image");
  scatter->add_option("image", image_path)->required();
  scatter->add_option("--output", output, "coefficients container")->required();

  auto* train_cmd = app.add_subcommand("train", "train a predictor from a dataset manifest");
  train_cmd->add_option("manifest", manifest_path)->required();
  train_cmd->add_option("--output", output, "checkpoint path")->required();

  auto* sr = app.add_subcommand("super-resolve", "upscale an image with a trained model");
  sr->add_option("image", image_path)->required();
  sr->add_option("checkpoint", ckpt_path)->required();
  sr->add_option("--output", output, "output image")->required();
  sr->add_option("--residual", residual_out, "also write the sampled residual (raw container)");

  auto* synth = app.add_subcommand("synthesize", "match a target's scattering features from noise");
  synth->add_option("target", image_path, "target image or coefficients container")->required();
  synth->add_option("--output", output, "output image")->required();

  auto* ft = app.add_subcommand("finetune", "likelihood-gradient fine-tuning of a checkpoint");
  ft->add_option("checkpoint", ckpt_path)->required();
  ft->add_option("manifest", manifest_path)->required();
  ft->add_option("--output", output, "fine-tuned checkpoint")->required();

  auto* stab = app.add_subcommand("eval-stability", "shift/blur stability curves over a folder");
  stab->add_option("folder", folder)->required();
  stab->add_option("--output", output, "CSV path")->required();

  auto* corpus = app.add_subcommand("make-corpus", "deterministic synthetic image corpus");
  corpus->add_option("folder", folder)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig cfg = parse_config(config_path, seed, threads);
    if (scatter->parsed()) return cmd_scatter(image_path, output, cfg, seed, threads);
    if (train_cmd->parsed()) return cmd_train(manifest_path, output, cfg, seed, threads, want_trace);
    if (sr->parsed()) {
      return cmd_super_resolve(image_path, ckpt_path, output, residual_out, cfg, seed, threads,
                               want_trace);
    }
    if (synth->parsed()) return cmd_synthesize(image_path, output, cfg, seed, threads, want_trace);
    if (ft->parsed()) {
      return cmd_finetune(ckpt_path, manifest_path, output, cfg, seed, threads, want_trace);
    }
    if (stab->parsed()) return cmd_eval_stability(folder, output, cfg, seed, threads);
    if (corpus->parsed()) return cmd_make_corpus(folder, cfg, seed, threads);
  } catch (const ConfigError& e) {
    std::cerr << "ssr-error kind=config message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "ssr-error kind=numeric message=\"" << e.what() << "\"\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "ssr-error kind=io message=\"" << e.what() << "\"\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ssr-error kind=config message=\"" << e.what() << "\"\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ssr-error kind=io message=\"" << e.what() << "\"\n";
    return 4;
  }
  return 0;
}
