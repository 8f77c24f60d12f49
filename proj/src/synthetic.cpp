#include "icp4d/synthetic.hpp"

#include <cstddef>
#include <stdexcept>

#include "icp4d/geometry.hpp"
#include "icp4d/rng.hpp"

namespace icp4d {

SyntheticSequence generate_synthetic(const SyntheticScene& scene, uint64_t seed) {
  std::size_t frames = 0;
  for (const RigidBody& body : scene.bodies) {
    if (body.body_id == 0) throw std::invalid_argument("body_id must be positive");
    if (frames == 0) frames = body.trajectory.size();
    if (body.trajectory.size() != frames)
      throw std::invalid_argument("trajectories must share one frame count");
    if (!body.visible.empty() && body.visible.size() != frames)
      throw std::invalid_argument("visibility must cover every frame");
  }
  if (scene.dropout < 0.0 || scene.dropout >= 1.0)
    throw std::invalid_argument("dropout must lie in [0, 1)");

  Rng rng(seed);
  SyntheticSequence out;
  out.scans.resize(frames);
  out.gt_ids.resize(frames);

  for (std::size_t f = 0; f < frames; ++f) {
    Scan& scan = out.scans[f];
    scan.frame_index = static_cast<int>(f);

    std::vector<const RigidBody*> shown;
    for (const RigidBody& body : scene.bodies)
      if (body.visible.empty() || body.visible[f]) shown.push_back(&body);

    // frame-local raw ids 1..V in a seeded scrambled order
    std::vector<uint32_t> raw_ids(shown.size());
    for (std::size_t i = 0; i < raw_ids.size(); ++i) raw_ids[i] = static_cast<uint32_t>(i + 1);
    rng.shuffle(raw_ids);

    for (std::size_t b = 0; b < shown.size(); ++b) {
      const RigidBody& body = *shown[b];
      for (const Point3& tp : body.template_points) {
        Point3 p = body.trajectory[f](tp);
        if (scene.noise_sigma > 0.0)
          p += {rng.gaussian() * scene.noise_sigma, rng.gaussian() * scene.noise_sigma,
                rng.gaussian() * scene.noise_sigma};
        const bool keep = scene.dropout == 0.0 || rng.uniform01() >= scene.dropout;
        if (!keep) continue;
        scan.points.push_back(p);
        scan.semantic.push_back(body.class_id);
        scan.instance.push_back(raw_ids[b]);
        out.gt_ids[f].push_back(body.body_id);
      }
    }
    for (const BackgroundSegment& bg : scene.background) {
      for (const Point3& p : bg.points) {
        scan.points.push_back(p);
        scan.semantic.push_back(bg.class_id);
        scan.instance.push_back(0);
        out.gt_ids[f].push_back(0);
      }
    }
  }
  return out;
}

}  // namespace icp4d
