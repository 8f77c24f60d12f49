#pragma once

#include <cstdint>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

// One rigid body moving through the scene. An empty visibility vector means
// the body is visible in every frame; otherwise one flag per frame.
struct RigidBody {
  uint32_t body_id = 0;  // ground-truth track id, > 0
  uint32_t class_id = 0;
  std::vector<Point3> template_points;
  std::vector<RigidTransform> trajectory;  // one pose per frame
  std::vector<bool> visible;
};

// Static stuff points emitted unchanged in every frame with instance id 0.
struct BackgroundSegment {
  uint32_t class_id = 0;
  std::vector<Point3> points;
};

struct SyntheticScene {
  std::vector<RigidBody> bodies;
  std::vector<BackgroundSegment> background;
  double noise_sigma = 0.0;  // isotropic, meters
  double dropout = 0.0;      // fraction of points removed, [0, 1)
};

struct SyntheticSequence {
  std::vector<Scan> scans;
  // Per scan, per point: the body id the point came from (0 for background).
  std::vector<std::vector<uint32_t>> gt_ids;
};

// Renders the scene frame by frame: visible bodies are posed by their
// trajectories, jittered by noise_sigma, thinned by dropout. Scan instance
// ids are frame-local and deliberately scrambled (a seeded permutation per
// frame) so consumers cannot shortcut association by reading them; the
// ground-truth ids ride alongside. Same seed, same output.
SyntheticSequence generate_synthetic(const SyntheticScene& scene, uint64_t seed);

}  // namespace icp4d
