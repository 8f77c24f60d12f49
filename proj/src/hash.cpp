#include "icp4d/hash.hpp"

#include <cstdio>
#include <fstream>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

std::string to_hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fnv1a_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for hashing: " + path);
  uint64_t h = 0xcbf29ce484222325ull;
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const std::streamsize got = in.gcount();
    if (got > 0) h = fnv1a(buf.data(), static_cast<std::size_t>(got), h);
  }
  return to_hex(h);
}

}  // namespace icp4d
