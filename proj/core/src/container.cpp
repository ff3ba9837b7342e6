#include "ssr/container.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ssr {
namespace {

constexpr char kMagic[8] = {'S', 'S', 'R', 'B', 'O', 'X', '0', '1'};

template <typename T>
void write_le(std::ostream& os, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw std::runtime_error("container: truncated file");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void Box::put_text(const std::string& name, const std::string& text) {
  Section s;
  s.name = name;
  s.kind = 0;
  s.text = text;
  sections_.push_back(std::move(s));
}

void Box::put_array(const std::string& name, const std::vector<double>& values) {
  Section s;
  s.name = name;
  s.kind = 1;
  s.values = values;
  sections_.push_back(std::move(s));
}

const Box::Section& Box::find(const std::string& name, std::uint8_t kind) const {
  for (const auto& s : sections_) {
    if (s.name == name && s.kind == kind) return s;
  }
  throw std::runtime_error("container: missing section '" + name + "'");
}

bool Box::has(const std::string& name) const {
  for (const auto& s : sections_) {
    if (s.name == name) return true;
  }
  return false;
}

const std::string& Box::text(const std::string& name) const { return find(name, 0).text; }

const std::vector<double>& Box::array(const std::string& name) const {
  return find(name, 1).values;
}

std::vector<std::string> Box::names() const {
  std::vector<std::string> out;
  out.reserve(sections_.size());
  for (const auto& s : sections_) out.push_back(s.name);
  return out;
}

void Box::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("container: cannot open '" + path + "' for writing");
  os.write(kMagic, sizeof(kMagic));
  write_le<std::uint32_t>(os, static_cast<std::uint32_t>(sections_.size()));
  for (const auto& s : sections_) {
    write_le<std::uint32_t>(os, static_cast<std::uint32_t>(s.name.size()));
    os.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
    os.put(static_cast<char>(s.kind));
    if (s.kind == 0) {
      write_le<std::uint64_t>(os, s.text.size());
      os.write(s.text.data(), static_cast<std::streamsize>(s.text.size()));
    } else {
      write_le<std::uint64_t>(os, s.values.size() * sizeof(double));
      for (double v : s.values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        write_le<std::uint64_t>(os, bits);
      }
    }
  }
  if (!os) throw std::runtime_error("container: write to '" + path + "' failed");
}

Box Box::load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("container: cannot open '" + path + "'");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("container: '" + path + "' is not an SSRBOX01 file");
  }
  Box box;
  const std::uint32_t count = read_le<std::uint32_t>(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    Section s;
    const std::uint32_t name_len = read_le<std::uint32_t>(is);
    s.name.resize(name_len);
    is.read(s.name.data(), name_len);
    const int kind = is.get();
    if (kind != 0 && kind != 1) throw std::runtime_error("container: unknown section kind");
    s.kind = static_cast<std::uint8_t>(kind);
    const std::uint64_t bytes = read_le<std::uint64_t>(is);
    if (s.kind == 0) {
      s.text.resize(bytes);
      is.read(s.text.data(), static_cast<std::streamsize>(bytes));
    } else {
      if (bytes % sizeof(double) != 0) throw std::runtime_error("container: bad array length");
      s.values.resize(bytes / sizeof(double));
      for (auto& v : s.values) {
        const std::uint64_t bits = read_le<std::uint64_t>(is);
        std::memcpy(&v, &bits, sizeof(v));
      }
    }
    if (!is) throw std::runtime_error("container: truncated file");
    box.sections_.push_back(std::move(s));
  }
  return box;
}

}  // namespace ssr
