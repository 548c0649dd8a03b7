#pragma once

// Little-endian binary record helpers shared by the dataset and checkpoint
// file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

namespace litm::detail {

inline std::uint64_t byteswap64(std::uint64_t v) {
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xffu);
  return r;
}

inline std::uint32_t byteswap32(std::uint32_t v) {
  return ((v & 0x000000ffu) << 24) | ((v & 0x0000ff00u) << 8) |
         ((v & 0x00ff0000u) >> 8) | ((v & 0xff000000u) >> 24);
}

inline void write_u32le(std::ostream& os, std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) v = byteswap32(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline void write_f64le(std::ostream& os, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, sizeof v);
  if constexpr (std::endian::native == std::endian::big) v = byteswap64(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

inline bool read_u32le(std::istream& is, std::uint32_t& out) {
  std::uint32_t v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) return false;
  if constexpr (std::endian::native == std::endian::big) v = byteswap32(v);
  out = v;
  return true;
}

inline bool read_f64le(std::istream& is, double& out) {
  std::uint64_t v;
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) return false;
  if constexpr (std::endian::native == std::endian::big) v = byteswap64(v);
  std::memcpy(&out, &v, sizeof out);
  return true;
}

}  // namespace litm::detail
