#include "icp4d/static_matcher.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_set>

#include "icp4d/log.hpp"

namespace icp4d {

std::optional<double> center_gate(const InstanceSegment& src, const InstanceSegment& dst,
                                  const StaticGateConfig& cfg) {
  const double d = (dst.mean - src.mean).norm();
  if (d < cfg.tau_center) return d;
  return std::nullopt;
}

std::optional<double> covariance_gate(const InstanceSegment& src, const InstanceSegment& dst,
                                      const StaticGateConfig& cfg) {
  const double denom = dst.covariance.trace() + src.covariance.trace();
  if (denom <= 0.0) {
    // Both covariances are PSD, so zero total trace forces both to be the
    // zero matrix: the shapes agree exactly, there is just no spread to
    // compare.
    ICP4D_DEBUG("covariance_gate: DegenerateShape, src " << src.instance_id << " dst "
                                                         << dst.instance_id);
    return 0.0;
  }
  const double ratio = (dst.covariance - src.covariance).frobenius_norm() / denom;
  if (ratio < cfg.tau_cov) return ratio;
  return std::nullopt;
}

StaticMatchResult match_static(const std::vector<CandidatePair>& candidates,
                               const StaticGateConfig& cfg) {
  struct Scored {
    double cov_score;
    double center_distance;
    uint32_t src_id;
    uint32_t dst_id;
  };
  std::vector<Scored> passed;
  for (const auto& [src, dst] : candidates) {
    const auto center = center_gate(*src, *dst, cfg);
    if (!center) continue;
    const auto cov = covariance_gate(*src, *dst, cfg);
    if (!cov) continue;
    passed.push_back({*cov, *center, src->instance_id, dst->instance_id});
  }
  std::sort(passed.begin(), passed.end(), [](const Scored& a, const Scored& b) {
    return std::tie(a.cov_score, a.center_distance, a.src_id, a.dst_id) <
           std::tie(b.cov_score, b.center_distance, b.src_id, b.dst_id);
  });

  StaticMatchResult out;
  std::unordered_set<uint32_t> used_src, used_dst;
  for (const Scored& s : passed) {
    if (used_src.count(s.src_id) || used_dst.count(s.dst_id)) continue;
    used_src.insert(s.src_id);
    used_dst.insert(s.dst_id);
    out.matches.push_back({s.src_id, s.dst_id, s.center_distance, s.cov_score});
  }
  for (const CandidatePair& pair : candidates)
    if (!used_src.count(pair.first->instance_id) && !used_dst.count(pair.second->instance_id))
      out.remaining.push_back(pair);
  return out;
}

}  // namespace icp4d
