#include "icp4d/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <stdexcept>

#include "icp4d/dbscan.hpp"
#include "icp4d/geometry.hpp"
#include "icp4d/log.hpp"
#include "icp4d/parallel.hpp"

namespace icp4d {

std::vector<InstanceSegment> extract_segments(
    const Scan& scan, const std::unordered_set<uint32_t>& thing_classes) {
  if (scan.points.size() != scan.semantic.size() || scan.points.size() != scan.instance.size())
    throw std::invalid_argument("scan arrays must share one length");

  std::map<uint32_t, std::vector<Point3>> grouped;
  std::map<uint32_t, uint32_t> class_of;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const uint32_t id = scan.instance[i];
    if (id == 0) continue;
    if (!thing_classes.empty() && !thing_classes.count(scan.semantic[i])) continue;
    grouped[id].push_back(scan.points[i]);
    class_of.emplace(id, scan.semantic[i]);
  }
  std::vector<InstanceSegment> out;
  out.reserve(grouped.size());
  for (auto& [id, pts] : grouped) out.push_back(make_segment(id, class_of[id], std::move(pts)));
  return out;
}

std::vector<CandidatePair> build_candidates(const std::vector<InstanceSegment>& src,
                                            const std::vector<InstanceSegment>& dst) {
  std::vector<CandidatePair> pairs;
  for (const InstanceSegment& s : src)
    for (const InstanceSegment& d : dst)
      if (s.class_id == d.class_id) pairs.push_back({&s, &d});
  return pairs;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.w_mem < 0) throw std::invalid_argument("w_mem must be non-negative");
}

void Tracker::reset() {
  prev_.clear();
  bank_.clear();
  next_id_ = 1;
  frame_ = 0;
  stats_ = StageStats{};
}

namespace {

class StageTimer {
 public:
  explicit StageTimer(double& sink)
      : sink_(sink), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  double& sink_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

namespace {

// Registers every pair concurrently and keeps those passing the overlap
// acceptance. Slots are index-addressed, so the thread count cannot change
// the result.
std::vector<AcceptedMatch> register_accepted(const std::vector<CandidatePair>& pairs,
                                             const IcpConfig& icp, unsigned threads) {
  std::vector<std::optional<AcceptedMatch>> slot(pairs.size());
  parallel_for(pairs.size(), threads == 0 ? default_threads() : threads, [&](std::size_t i) {
    const auto& [src, dst] = pairs[i];
    const RegistrationResult res = register_segments(*src, *dst, icp);
    if (res.iou >= icp.tau_iou)
      slot[i] = AcceptedMatch{src->instance_id, dst->instance_id, res.transform, res.iou};
  });
  std::vector<AcceptedMatch> accepted;
  for (const auto& s : slot)
    if (s) accepted.push_back(*s);
  return accepted;
}

}  // namespace

std::vector<uint32_t> Tracker::step(const Scan& raw_scan) {
  Scan scan;
  if (cfg_.dbscan) {
    const StageTimer timer(stats_.refine_seconds);
    scan = refine_dbscan(raw_scan, cfg_.dbscan->eps, cfg_.dbscan->min_points);
  } else {
    scan = raw_scan;
  }
  const int t = frame_++;

  // entries older than the window never take part again
  std::erase_if(bank_, [&](const BankEntry& e) { return e.last_seen_frame < t - cfg_.w_mem; });

  std::vector<InstanceSegment> curr = extract_segments(scan, cfg_.thing_classes);
  std::map<uint32_t, uint32_t> global_of;  // raw id -> global id

  if (t > 0 && !curr.empty()) {
    std::vector<CandidatePair> pool = build_candidates(curr, prev_);

    if (cfg_.enable_static_stage) {
      const StageTimer timer(stats_.static_seconds);
      StaticMatchResult sm = match_static(pool, cfg_.static_gate);
      for (const StaticMatch& m : sm.matches) global_of[m.src_id] = m.dst_id;
      stats_.static_matches += sm.matches.size();
      pool = std::move(sm.remaining);
      ICP4D_DEBUG("frame " << t << ": static stage matched " << global_of.size()
                           << ", dynamic pool " << pool.size());
    }

    {
      const StageTimer timer(stats_.dynamic_seconds);
      const std::vector<AcceptedMatch> accepted =
          register_accepted(pool, cfg_.icp, cfg_.threads);
      const std::vector<CostEntry> table = build_cost(accepted, cfg_.assignment);
      const Assignment chosen = cfg_.assigner == AssignerMode::kGreedy
                                    ? assign_greedy(table)
                                    : assign_hungarian(table);
      for (const auto& [src_id, dst_id] : chosen) global_of[src_id] = dst_id;
      stats_.dynamic_matches += chosen.size();
    }

    // the missing stage: leftovers consult the memory bank
    if (!bank_.empty()) {
      const StageTimer timer(stats_.bank_seconds);
      std::vector<InstanceSegment> cached;
      cached.reserve(bank_.size());
      for (const BankEntry& e : bank_)
        cached.push_back(make_segment(e.global_id, e.class_id, e.points));
      std::vector<InstanceSegment> orphans;
      for (const InstanceSegment& seg : curr)
        if (!global_of.count(seg.instance_id)) orphans.push_back(seg);

      const std::vector<AcceptedMatch> recovered =
          register_accepted(build_candidates(orphans, cached), cfg_.icp, cfg_.threads);
      const std::vector<CostEntry> bank_table = build_cost(recovered, cfg_.assignment);
      const Assignment restored = cfg_.assigner == AssignerMode::kGreedy
                                      ? assign_greedy(bank_table)
                                      : assign_hungarian(bank_table);
      for (const auto& [src_id, global_id] : restored) {
        global_of[src_id] = global_id;
        std::erase_if(bank_, [&](const BankEntry& e) { return e.global_id == global_id; });
      }
      stats_.bank_matches += restored.size();
    }
  }

  for (const InstanceSegment& seg : curr)  // fresh tracks, ascending raw id
    if (!global_of.count(seg.instance_id)) {
      global_of[seg.instance_id] = next_id_++;
      ++stats_.fresh_tracks;
    }

  // previous-frame tracks that found no successor wait in the bank
  if (t > 0) {
    std::unordered_set<uint32_t> continued;
    for (const auto& [raw, gid] : global_of) continued.insert(gid);
    for (InstanceSegment& seg : prev_)
      if (!continued.count(seg.instance_id))
        bank_.push_back({seg.instance_id, seg.class_id, std::move(seg.points), t - 1});
    std::erase_if(bank_, [&](const BankEntry& e) { return e.last_seen_frame < t - cfg_.w_mem; });
  }

  prev_.clear();
  prev_.reserve(curr.size());
  for (InstanceSegment& seg : curr) {
    const uint32_t gid = global_of.at(seg.instance_id);
    seg.instance_id = gid;
    prev_.push_back(std::move(seg));
  }

  std::vector<uint32_t> ids(scan.size(), 0);
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const uint32_t raw = scan.instance[i];
    if (raw == 0) continue;
    const auto it = global_of.find(raw);
    if (it != global_of.end()) ids[i] = it->second;
  }
  return ids;
}

std::vector<std::vector<uint32_t>> Tracker::run_sequence(const std::vector<Scan>& scans) {
  reset();
  std::vector<std::vector<uint32_t>> out;
  out.reserve(scans.size());
  for (const Scan& scan : scans) out.push_back(step(scan));
  return out;
}

}  // namespace icp4d
