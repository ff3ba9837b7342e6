#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssr/degradation.hpp"
#include "ssr/image.hpp"

namespace ssr {

/// Supported raster formats: binary PGM (P5) and PPM (P6) with maxval 255,
/// mapped to [0, 1]; plus the raw float container (.ssrbox) for residuals,
/// which round-trips bit-exactly. The extension picks the format.
Image load_image(const std::string& path);
void save_image(const Image& img, const std::string& path);

/// Rec. 601 luma for 3-channel images; 1-channel images pass through.
Image luminance(const Image& img);

/// Rec. 601 RGB <-> YCbCr (Cb/Cr centered at 0). Used by the CLI to run the
/// model on luma while chroma is upsampled bicubically.
Image rgb_to_ycbcr(const Image& rgb);
Image ycbcr_to_rgb(const Image& ycbcr);

/// FNV-1a 64-bit over the file bytes, hex-encoded; detects corpus drift.
std::string file_hash_hex(const std::string& path);

struct ManifestEntry {
  std::string path;
  std::string hash;
};

struct DatasetManifest {
  int schema_version = 1;
  std::size_t patch_size = 64;
  std::size_t patches_per_image = 2;  // cap per image
  std::uint64_t seed = 0;
  std::vector<ManifestEntry> entries;
};

/// Hashes every file; paths must exist.
DatasetManifest build_manifest(const std::vector<std::string>& paths, std::size_t patch_size,
                               std::size_t patches_per_image, std::uint64_t seed);
void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

struct PatchTriple {
  Image x;  // downsampled patch
  Image y;  // high-resolution patch
  Image r;  // y - linear_predict(x)
};

/// Deterministic patch extraction: per image, up to the configured cap of
/// random patch positions (seeded). Each triple satisfies x = downsample(y)
/// and r + linear_predict(x) == y exactly. Patch size must be divisible by
/// the degradation factor and by 2^scales. Re-hashes every file and fails
/// naming the file on drift.
std::vector<PatchTriple> extract_patches(const DatasetManifest& manifest,
                                         const DegradationModel& degradation,
                                         std::size_t scattering_scales);

}  // namespace ssr
