#pragma once

#include <utility>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

struct KabschResult {
  RigidTransform transform;
  bool degenerate = false;  // all source points coincident
};

// Closed-form weighted least-squares rigid fit: minimizes
// sum_i w_i ||R*src_i + t - dst_i||^2 over SO(3) x R^3 via SVD of the weighted
// cross-covariance with reflection correction. Empty weights mean all ones.
// Throws EmptySegment when src is empty; src and dst must have equal length.
KabschResult kabsch_update(const std::vector<Point3>& src, const std::vector<Point3>& dst,
                           const std::vector<double>& weights = {});

KabschResult kabsch_update(const std::vector<std::pair<Point3, Point3>>& correspondences);

}  // namespace icp4d
