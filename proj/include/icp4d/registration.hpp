#pragma once

#include <cstddef>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

enum class CorrespondenceMode { kSinkhorn, kNearestNeighbor };

struct IcpConfig {
  int max_iterations = 30;
  CorrespondenceMode correspondence_mode = CorrespondenceMode::kSinkhorn;
  double epsilon = 0.2;            // entropic regularizer, m^2 units of cost
  double tau_dist = 0.1;           // inlier radius, meters
  double tau_iou = 0.2;            // acceptance threshold
  bool use_histogram_init = true;
  double convergence_delta = 1e-4;    // meters / radians per-update stop
  std::size_t subsample_limit = 1024;  // correspondence-search cap; 0 = off
};

struct RegistrationResult {
  RigidTransform transform;
  double iou = 0.0;
  std::size_t inlier_count = 0;
  int iterations_run = 0;
  bool converged = false;
  // Mean squared correspondence distance when each iteration's matches were
  // formed. Classical monotone in nearest-neighbor mode; diagnostic only
  // under soft matching.
  std::vector<double> residual_trace;
};

struct AcceptResult {
  double iou = 0.0;
  std::size_t inlier_count = 0;
  bool matched = false;
};

// Translation-dominant initial guess: mode of the 0.1 m-binned histogram of
// cross displacements, plus the best yaw from a +/-30 deg grid (5 deg steps)
// about the source centroid. Deterministic.
RigidTransform histogram_init(const InstanceSegment& src, const InstanceSegment& dst);

// Iterative correspond -> least-squares update loop mapping src onto dst.
RegistrationResult register_segments(const InstanceSegment& src, const InstanceSegment& dst,
                                     const IcpConfig& cfg = {});

// Inlier/union overlap of the transformed source against the destination:
// inliers are transformed source points with a destination neighbor closer
// than tau_dist; iou = inliers / (|src| + |dst| - inliers).
AcceptResult accept(const std::vector<Point3>& src, const std::vector<Point3>& dst,
                    const RigidTransform& transform, const IcpConfig& cfg = {});
AcceptResult accept(const InstanceSegment& src, const InstanceSegment& dst,
                    const RigidTransform& transform, const IcpConfig& cfg = {});

}  // namespace icp4d
