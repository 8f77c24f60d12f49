#pragma once

#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

// Plain Euclidean DBSCAN. Returns one label per point: a cluster index from 0
// upward, or -1 for noise. Neighborhoods are closed balls (distance <= eps)
// and the point itself counts toward min_points. Deterministic: clusters are
// discovered in point-index order.
std::vector<int> dbscan_labels(const std::vector<Point3>& points, double eps, int min_points);

// Re-clusters each predicted instance's points independently; every cluster
// becomes a fresh raw instance id (allocated past the scan's current maximum)
// while noise points keep their parent's id. Stuff points are untouched.
Scan refine_dbscan(const Scan& scan, double eps, int min_points);

}  // namespace icp4d
