#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

struct StaticGateConfig {
  double tau_center = 0.1;  // meters
  double tau_cov = 0.1;     // dimensionless
};

// One accepted non-moving association. Both scores are below their gates.
struct StaticMatch {
  uint32_t src_id = 0;
  uint32_t dst_id = 0;
  double center_distance = 0.0;
  double cov_score = 0.0;
};

using CandidatePair = std::pair<const InstanceSegment*, const InstanceSegment*>;

struct StaticMatchResult {
  std::vector<StaticMatch> matches;
  std::vector<CandidatePair> remaining;  // pairs untouched by any match
};

// ‖μ_d − μ_s‖₂ if below tau_center, otherwise nothing. Callers pass pairs of
// the same class; the gate itself only looks at geometry.
std::optional<double> center_gate(const InstanceSegment& src, const InstanceSegment& dst,
                                  const StaticGateConfig& cfg);

// Shape-consistency ratio ‖σ_d − σ_s‖_F / (tr σ_d + tr σ_s) if below tau_cov.
// A zero denominator means both spreads are the zero matrix (single-point or
// fully coincident segments): identical degenerate shapes, ratio 0, passes.
std::optional<double> covariance_gate(const InstanceSegment& src, const InstanceSegment& dst,
                                      const StaticGateConfig& cfg);

// Runs both gates over the candidate pairs, then resolves duplicates greedily
// over globally sorted scores (ascending cov_score, center_distance, then ids)
// so each source and each destination appears in at most one match. Pairs
// whose source or destination got matched are dropped from `remaining`.
StaticMatchResult match_static(const std::vector<CandidatePair>& candidates,
                               const StaticGateConfig& cfg);

}  // namespace icp4d
