#include <string>

#include "icp4d/io.hpp"
#include "io_bytes.hpp"

namespace icp4d {
namespace {

constexpr uint8_t kMagic[4] = {'I', '4', 'D', 'S'};
constexpr uint16_t kVersion = 1;
constexpr std::size_t kRecordBytes = 8 * 3 + 4 + 4;

}  // namespace

Scan load_generic_scan(const std::filesystem::path& path) {
  const std::vector<uint8_t> bytes = detail::read_file_bytes(path);
  detail::ByteReader r(bytes, path.string());
  for (uint8_t m : kMagic)
    if (r.u8() != m) throw FormatError(path.string() + ": bad magic");
  const uint16_t version = r.u16();
  if (version != kVersion)
    throw FormatError(path.string() + ": unsupported version " + std::to_string(version));
  const uint64_t n = r.u64();
  if (r.remaining() / kRecordBytes != n || r.remaining() % kRecordBytes != 0)
    throw FormatError(path.string() + ": record bytes do not match declared count");

  Scan scan;
  scan.points.reserve(n);
  scan.semantic.reserve(n);
  scan.instance.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    Point3 p;
    p.x = r.f64();
    p.y = r.f64();
    p.z = r.f64();
    scan.points.push_back(p);
    scan.semantic.push_back(r.u32());
    scan.instance.push_back(r.u32());
  }
  return scan;
}

void write_generic_scan(const Scan& scan, const std::filesystem::path& path) {
  detail::ByteWriter w;
  for (uint8_t m : kMagic) w.u8(m);
  w.u16(kVersion);
  w.u64(scan.size());
  for (std::size_t i = 0; i < scan.size(); ++i) {
    w.f64(scan.points[i].x);
    w.f64(scan.points[i].y);
    w.f64(scan.points[i].z);
    w.u32(scan.semantic[i]);
    w.u32(scan.instance[i]);
  }
  detail::write_file_bytes(path, w.bytes());
}

}  // namespace icp4d
