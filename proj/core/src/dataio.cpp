#include "ssr/dataio.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ssr/container.hpp"
#include "ssr/rng.hpp"

namespace ssr {
namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int next_pnm_token(std::istream& is) {
  // skips whitespace and '#' comments, returns the next integer
  while (true) {
    int c = is.peek();
    if (c == '#') {
      std::string line;
      std::getline(is, line);
    } else if (std::isspace(c)) {
      is.get();
    } else {
      break;
    }
  }
  int value = 0;
  is >> value;
  if (!is) throw std::runtime_error("pnm: malformed header");
  return value;
}

Image load_pnm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_image: cannot open '" + path + "'");
  char p = 0, kind = 0;
  is.get(p);
  is.get(kind);
  if (p != 'P' || (kind != '5' && kind != '6')) {
    throw std::runtime_error("load_image: '" + path + "' is not binary PGM/PPM");
  }
  const std::size_t channels = (kind == '6') ? 3 : 1;
  const std::size_t width = static_cast<std::size_t>(next_pnm_token(is));
  const std::size_t height = static_cast<std::size_t>(next_pnm_token(is));
  const int maxval = next_pnm_token(is);
  if (maxval != 255) throw std::runtime_error("load_image: only maxval 255 is supported");
  is.get();  // single whitespace after the header

  std::vector<unsigned char> raw(channels * height * width);
  is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!is) throw std::runtime_error("load_image: truncated '" + path + "'");

  Image img(channels, height, width);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      for (std::size_t c = 0; c < channels; ++c) {
        img.at(c, y, x) = raw[(y * width + x) * channels + c] / 255.0;
      }
    }
  }
  return img;
}

void save_pnm(const Image& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3) {
    throw std::invalid_argument("save_image: PNM needs 1 or 3 channels");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_image: cannot open '" + path + "'");
  os << (img.channels == 1 ? "P5" : "P6") << "\n"
     << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> raw(img.channels * img.height * img.width);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      for (std::size_t c = 0; c < img.channels; ++c) {
        const double v = std::min(1.0, std::max(0.0, img.at(c, y, x)));
        raw[(y * img.width + x) * img.channels + c] =
            static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }
  os.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!os) throw std::runtime_error("save_image: write to '" + path + "' failed");
}

Image load_raw(const std::string& path) {
  const Box box = Box::load(path);
  const nlohmann::json meta = nlohmann::json::parse(box.text("meta"));
  if (meta.value("format", "") != "raw_image") {
    throw std::runtime_error("load_image: '" + path + "' is not a raw image container");
  }
  Image img(meta.at("channels").get<std::size_t>(), meta.at("height").get<std::size_t>(),
            meta.at("width").get<std::size_t>());
  const auto& data = box.array("data");
  if (data.size() != img.size()) throw std::runtime_error("load_image: bad raw payload size");
  img.data = data;
  return img;
}

void save_raw(const Image& img, const std::string& path) {
  nlohmann::json meta;
  meta["format"] = "raw_image";
  meta["schema_version"] = 1;
  meta["channels"] = img.channels;
  meta["height"] = img.height;
  meta["width"] = img.width;
  Box box;
  box.put_text("meta", meta.dump());
  box.put_array("data", img.data);
  box.save(path);
}

}  // namespace

Image load_image(const std::string& path) {
  if (ends_with(path, ".ssrbox")) return load_raw(path);
  if (ends_with(path, ".pgm") || ends_with(path, ".ppm")) return load_pnm(path);
  throw std::runtime_error("load_image: unsupported format for '" + path +
                           "' (expected .pgm, .ppm or .ssrbox)");
}

void save_image(const Image& img, const std::string& path) {
  check_finite(img, "save_image");
  if (ends_with(path, ".ssrbox")) {
    save_raw(img, path);
  } else if (ends_with(path, ".pgm") || ends_with(path, ".ppm")) {
    save_pnm(img, path);
  } else {
    throw std::runtime_error("save_image: unsupported format for '" + path + "'");
  }
}

Image luminance(const Image& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) throw std::invalid_argument("luminance: expected 1 or 3 channels");
  Image out(1, img.height, img.width);
  for (std::size_t i = 0; i < out.plane_size(); ++i) {
    out.data[i] = 0.299 * img.channel(0)[i] + 0.587 * img.channel(1)[i] + 0.114 * img.channel(2)[i];
  }
  return out;
}

Image rgb_to_ycbcr(const Image& rgb) {
  if (rgb.channels != 3) throw std::invalid_argument("rgb_to_ycbcr: expected 3 channels");
  Image out(3, rgb.height, rgb.width);
  for (std::size_t i = 0; i < rgb.plane_size(); ++i) {
    const double r = rgb.channel(0)[i], g = rgb.channel(1)[i], b = rgb.channel(2)[i];
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    out.channel(0)[i] = y;
    out.channel(1)[i] = (b - y) * 0.564;
    out.channel(2)[i] = (r - y) * 0.713;
  }
  return out;
}

Image ycbcr_to_rgb(const Image& ycbcr) {
  if (ycbcr.channels != 3) throw std::invalid_argument("ycbcr_to_rgb: expected 3 channels");
  Image out(3, ycbcr.height, ycbcr.width);
  for (std::size_t i = 0; i < ycbcr.plane_size(); ++i) {
    const double y = ycbcr.channel(0)[i], cb = ycbcr.channel(1)[i], cr = ycbcr.channel(2)[i];
    const double r = y + cr / 0.713;
    const double b = y + cb / 0.564;
    const double g = (y - 0.299 * r - 0.114 * b) / 0.587;
    out.channel(0)[i] = r;
    out.channel(1)[i] = g;
    out.channel(2)[i] = b;
  }
  return out;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("file_hash_hex: cannot open '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (is) {
    is.read(buf, sizeof(buf));
    const std::streamsize got = is.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

DatasetManifest build_manifest(const std::vector<std::string>& paths, std::size_t patch_size,
                               std::size_t patches_per_image, std::uint64_t seed) {
  if (patches_per_image < 1) throw std::invalid_argument("build_manifest: cap must be >= 1");
  DatasetManifest manifest;
  manifest.patch_size = patch_size;
  manifest.patches_per_image = patches_per_image;
  manifest.seed = seed;
  for (const std::string& p : paths) {
    manifest.entries.push_back({p, file_hash_hex(p)});
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  nlohmann::json j;
  j["schema_version"] = manifest.schema_version;
  j["patch_size"] = manifest.patch_size;
  j["patches_per_image"] = manifest.patches_per_image;
  j["seed"] = manifest.seed;
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"path", e.path}, {"hash", e.hash}});
  }
  j["entries"] = entries;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_manifest: cannot open '" + path + "'");
  os << j.dump(2) << "\n";
}

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_manifest: cannot open '" + path + "'");
  nlohmann::json j;
  is >> j;
  DatasetManifest manifest;
  manifest.schema_version = j.at("schema_version").get<int>();
  if (manifest.schema_version != 1) {
    throw std::runtime_error("load_manifest: unsupported schema version");
  }
  manifest.patch_size = j.at("patch_size").get<std::size_t>();
  manifest.patches_per_image = j.at("patches_per_image").get<std::size_t>();
  manifest.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("entries")) {
    manifest.entries.push_back({e.at("path").get<std::string>(), e.at("hash").get<std::string>()});
  }
  return manifest;
}

std::vector<PatchTriple> extract_patches(const DatasetManifest& manifest,
                                         const DegradationModel& degradation,
                                         std::size_t scattering_scales) {
  degradation.validate();
  const std::size_t patch = manifest.patch_size;
  const std::size_t block = std::size_t{1} << scattering_scales;
  if (patch % degradation.factor != 0 || patch % block != 0) {
    throw std::invalid_argument(
        "extract_patches: patch size must be divisible by the degradation factor and 2^J");
  }

  std::vector<PatchTriple> triples;
  Rng rng(manifest.seed ^ 0xda7a5e7ULL);
  for (const auto& entry : manifest.entries) {
    if (file_hash_hex(entry.path) != entry.hash) {
      throw std::runtime_error("extract_patches: corpus drift, hash mismatch for '" + entry.path +
                               "'");
    }
    const Image full = luminance(load_image(entry.path));
    if (full.height < patch || full.width < patch) {
      throw std::invalid_argument("extract_patches: '" + entry.path + "' smaller than the patch");
    }
    for (std::size_t k = 0; k < manifest.patches_per_image; ++k) {
      const std::size_t y0 = (full.height == patch) ? 0 : rng.below(full.height - patch + 1);
      const std::size_t x0 = (full.width == patch) ? 0 : rng.below(full.width - patch + 1);
      PatchTriple t;
      t.y = Image(1, patch, patch);
      for (std::size_t y = 0; y < patch; ++y) {
        for (std::size_t x = 0; x < patch; ++x) {
          t.y.at(0, y, x) = full.at(0, y0 + y, x0 + x);
        }
      }
      t.x = downsample(t.y, degradation);
      t.r = residual(t.y, t.x, degradation);
      triples.push_back(std::move(t));
    }
  }
  return triples;
}

}  // namespace ssr
