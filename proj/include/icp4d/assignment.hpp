#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "icp4d/registration.hpp"
#include "icp4d/types.hpp"

namespace icp4d {

// Rejected or absent pairs carry this cost; anything at or above it is never
// part of an assignment (leaving the pair unmatched is always preferred).
inline constexpr double kSentinelCost = 1e6;

// Per-pair transformation-aware cost, split into its weighted components:
// translation magnitude, rotation angle, and shape disagreement 1 - iou.
struct MatchCost {
  double c_t = 0.0;
  double c_r = 0.0;
  double c_s = 0.0;
  double gamma_t = 1.0;
  double gamma_r = 1.0;
  double gamma_s = 1.0;

  double total() const { return gamma_t * c_t + gamma_r * c_r + gamma_s * c_s; }
};

// One source/destination pair that survived registration acceptance.
struct AcceptedMatch {
  uint32_t src_id = 0;
  uint32_t dst_id = 0;
  RigidTransform transform;
  double iou = 0.0;
};

struct CostEntry {
  uint32_t src_id = 0;
  uint32_t dst_id = 0;
  double iou = 0.0;
  MatchCost cost;
};

struct AssignmentConfig {
  double gamma_t = 1.0;
  double gamma_r = 1.0;
  double gamma_s = 1.0;
  // Translation and rotation magnitudes are either divided by their per-frame
  // maxima (scale-free) or by fixed constants supplied here.
  enum class Normalization { kPerFrameMax, kFixedScales } normalization = Normalization::kPerFrameMax;
  double translation_scale = 1.0;  // meters, kFixedScales only
  double rotation_scale = 1.0;     // radians, kFixedScales only
};

using Assignment = std::vector<std::pair<uint32_t, uint32_t>>;  // sorted by src_id

// Cost table over the accepted pairs: c_t = ‖t‖₂ and c_r = ‖θ‖₂ (axis-angle
// norm) normalized per config, c_s = 1 − iou, combined with the gamma weights.
std::vector<CostEntry> build_cost(const std::vector<AcceptedMatch>& accepted,
                                  const AssignmentConfig& cfg = {});

// Picks pairs in order of descending iou (ties: ascending total cost, then
// ascending ids), skipping any pair whose source or destination is taken.
Assignment assign_greedy(const std::vector<CostEntry>& table);

// Minimum-total-cost one-to-one assignment over the accepted pairs; rows and
// columns that cannot be covered without a sentinel pair stay unmatched.
Assignment assign_hungarian(const std::vector<CostEntry>& table);

// Dense solver behind assign_hungarian, exposed for direct use on raw tables:
// returns the assigned column per row (-1 = unmatched). Entries at or above
// the sentinel are treated as forbidden.
std::vector<int> hungarian_min_cost(const std::vector<std::vector<double>>& cost,
                                    double sentinel = kSentinelCost);

}  // namespace icp4d
