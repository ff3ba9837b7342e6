#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ssr {

/// Flat binary container shared by filter banks, scattering coefficients,
/// checkpoints and raw float images.
///
/// Layout (all integers little-endian):
///   magic "SSRBOX01"
///   u32 section count
///   per section: u32 name length, name bytes, u8 kind, u64 payload bytes,
///                payload
/// kind 0 holds UTF-8 text (metadata as JSON), kind 1 holds float64 arrays.
class Box {
 public:
  void put_text(const std::string& name, const std::string& text);
  void put_array(const std::string& name, const std::vector<double>& values);

  bool has(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  const std::vector<double>& array(const std::string& name) const;

  std::vector<std::string> names() const;

  void save(const std::string& path) const;
  static Box load(const std::string& path);

 private:
  struct Section {
    std::string name;
    std::uint8_t kind = 0;
    std::string text;
    std::vector<double> values;
  };
  const Section& find(const std::string& name, std::uint8_t kind) const;
  std::vector<Section> sections_;
};

}  // namespace ssr
