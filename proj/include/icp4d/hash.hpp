#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace icp4d {

// FNV-1a, 64-bit
inline uint64_t fnv1a(const void* data, std::size_t len, uint64_t seed = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a_file_hex(const std::string& path);  // throws IoError
std::string to_hex(uint64_t v);

}  // namespace icp4d
