#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "icp4d/io.hpp"
#include "io_bytes.hpp"

namespace icp4d {
namespace {

std::pair<std::vector<uint32_t>, std::vector<uint32_t>> parse_labels(
    const std::vector<uint8_t>& bytes, const std::string& name) {
  if (bytes.size() % 4 != 0)
    throw FormatError(name + ": label length is not a multiple of 4 bytes");
  detail::ByteReader r(bytes, name);
  std::pair<std::vector<uint32_t>, std::vector<uint32_t>> out;
  const std::size_t n = bytes.size() / 4;
  out.first.reserve(n);
  out.second.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const uint32_t v = r.u32();
    out.first.push_back(v & 0xFFFFu);
    out.second.push_back(v >> 16);
  }
  return out;
}

// All whitespace-separated reals on the line; rejects trailing junk.
std::vector<double> parse_reals(const std::string& line, const std::string& name) {
  std::istringstream iss(line);
  std::vector<double> vals;
  double v = 0.0;
  while (iss >> v) vals.push_back(v);
  iss.clear();
  iss >> std::ws;
  if (!iss.eof()) throw FormatError(name + ": non-numeric token in line '" + line + "'");
  return vals;
}

struct Affine {
  Mat3 r;
  Vec3 t;
};

Affine from_row_major(const std::vector<double>& v) {
  Affine a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a.r[i][j] = v[static_cast<std::size_t>(4 * i + j)];
  a.t = Vec3{v[3], v[7], v[11]};
  return a;
}

}  // namespace

Scan load_kitti_scan(const std::filesystem::path& bin_path,
                     const std::filesystem::path& label_path, const Pose& pose) {
  const std::vector<uint8_t> bin = detail::read_file_bytes(bin_path);
  if (bin.size() % 16 != 0)
    throw FormatError(bin_path.string() + ": length is not a multiple of 16 bytes");
  const std::size_t n = bin.size() / 16;

  auto [semantic, instance] = parse_labels(detail::read_file_bytes(label_path),
                                           label_path.string());
  if (semantic.size() != n)
    throw FormatError(label_path.string() + ": " + std::to_string(semantic.size()) +
                      " labels for " + std::to_string(n) + " points");

  Scan scan;
  scan.points.reserve(n);
  detail::ByteReader r(bin, bin_path.string());
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(r.f32());
    const double y = static_cast<double>(r.f32());
    const double z = static_cast<double>(r.f32());
    r.f32();  // remission, unused
    scan.points.push_back(pose(Point3{x, y, z}));
  }
  scan.semantic = std::move(semantic);
  scan.instance = std::move(instance);
  return scan;
}

std::pair<std::vector<uint32_t>, std::vector<uint32_t>> load_labels(
    const std::filesystem::path& label_path) {
  return parse_labels(detail::read_file_bytes(label_path), label_path.string());
}

std::vector<Pose> load_poses(const std::filesystem::path& poses_path,
                             const std::filesystem::path& calib_path) {
  std::ifstream calib(calib_path);
  if (!calib) throw IoError("cannot open " + calib_path.string());
  Affine tr;
  bool has_tr = false;
  for (std::string line; std::getline(calib, line);) {
    if (line.rfind("Tr:", 0) != 0) continue;
    const std::vector<double> vals = parse_reals(line.substr(3), calib_path.string());
    if (vals.size() != 12)
      throw FormatError(calib_path.string() + ": Tr line has " +
                        std::to_string(vals.size()) + " values, expected 12");
    tr = from_row_major(vals);
    has_tr = true;
    break;
  }
  if (!has_tr) throw FormatError(calib_path.string() + ": no Tr line");

  std::ifstream poses(poses_path);
  if (!poses) throw IoError("cannot open " + poses_path.string());
  const Mat3 tr_rt = tr.r.transposed();
  std::vector<Pose> out;
  for (std::string line; std::getline(poses, line);) {
    const std::vector<double> vals = parse_reals(line, poses_path.string());
    if (vals.empty()) continue;
    if (vals.size() != 12)
      throw FormatError(poses_path.string() + ": pose line has " +
                        std::to_string(vals.size()) + " values, expected 12");
    const Affine p = from_row_major(vals);
    // Sensor-to-world: Tr^-1 * P * Tr applied as p -> Tr^-1(P(Tr(p))).
    Pose pose;
    pose.rotation = tr_rt * p.r * tr.r;
    pose.translation = tr_rt * (p.r * tr.t + p.t - tr.t);
    out.push_back(pose);
  }
  return out;
}

void write_labels(const Scan& scan, const std::vector<uint32_t>& assigned_instance_ids,
                  const std::filesystem::path& out_path) {
  if (assigned_instance_ids.size() != scan.size())
    throw std::invalid_argument("assigned id count does not match scan size");
  detail::ByteWriter w;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const uint32_t sem = scan.semantic[i];
    const uint32_t id = assigned_instance_ids[i];
    if (sem > 0xFFFFu)
      throw OverflowError("semantic class " + std::to_string(sem) +
                          " does not fit 16 bits");
    if (id > 0xFFFFu)
      throw OverflowError("instance id " + std::to_string(id) + " does not fit 16 bits");
    w.u32((id << 16) | sem);
  }
  detail::write_file_bytes(out_path, w.bytes());
}

}  // namespace icp4d
