#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

// Sensor-to-world pose for one frame (rotation block plus translation).
struct Pose {
  Mat3 rotation;
  Vec3 translation{};

  Point3 operator()(const Point3& p) const { return rotation * p + translation; }
};

// SemanticKITTI scan pair: the .bin file holds consecutive little-endian
// float32 quadruples (x, y, z, remission; remission is discarded), the .label
// file one little-endian u32 per point with the semantic class in the low 16
// bits and the instance id in the high 16. Points are transformed into world
// coordinates by `pose` at load time. Throws IoError when a file cannot be
// read, FormatError on malformed sizes or a bin/label count mismatch.
Scan load_kitti_scan(const std::filesystem::path& bin_path,
                     const std::filesystem::path& label_path, const Pose& pose);

// Just the label arrays of a .label file: {semantic, instance}.
std::pair<std::vector<uint32_t>, std::vector<uint32_t>> load_labels(
    const std::filesystem::path& label_path);

// KITTI odometry poses: each line of poses_path holds a row-major 3x4 camera
// pose P; calib_path supplies the "Tr:" sensor-to-camera extrinsic. The
// returned sensor-to-world poses are Tr^-1 * P * Tr. Malformed lines or a
// missing Tr entry throw FormatError.
std::vector<Pose> load_poses(const std::filesystem::path& poses_path,
                             const std::filesystem::path& calib_path);

// Writes one u32 per point: low 16 bits the scan's semantic class, high 16
// the assigned instance id. Round-trips through load_labels/load_kitti_scan.
// Throws OverflowError if an id or semantic class does not fit 16 bits.
void write_labels(const Scan& scan, const std::vector<uint32_t>& assigned_instance_ids,
                  const std::filesystem::path& out_path);

// Self-describing single-file format for non-KITTI input, little-endian:
// magic "I4DS", version u16, point count u64, then per point x,y,z float64
// followed by semantic and instance u32. Coordinates are world-frame.
Scan load_generic_scan(const std::filesystem::path& path);
void write_generic_scan(const Scan& scan, const std::filesystem::path& path);

}  // namespace icp4d
