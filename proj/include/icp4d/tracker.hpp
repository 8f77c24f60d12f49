#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "icp4d/assignment.hpp"
#include "icp4d/registration.hpp"
#include "icp4d/static_matcher.hpp"
#include "icp4d/types.hpp"

namespace icp4d {

struct DbscanConfig {
  double eps = 0.5;    // meters
  int min_points = 1;
};

enum class AssignerMode { kGreedy, kHungarian };

struct TrackerConfig {
  StaticGateConfig static_gate;
  IcpConfig icp;
  AssignmentConfig assignment;
  AssignerMode assigner = AssignerMode::kGreedy;
  int w_mem = 3;  // memory-bank window, scans; 0 disables the bank
  std::optional<DbscanConfig> dbscan;
  // Classes whose instances are tracked. Empty = any point with a nonzero
  // instance id counts.
  std::unordered_set<uint32_t> thing_classes;
  bool enable_static_stage = true;
  unsigned threads = 0;  // registration parallelism; 0 = hardware default
};

// A track that vanished and may still come back within the window.
struct BankEntry {
  uint32_t global_id = 0;
  uint32_t class_id = 0;
  std::vector<Point3> points;  // world coordinates
  int last_seen_frame = 0;
};

// Cumulative per-stage bookkeeping across step() calls.
struct StageStats {
  std::size_t static_matches = 0;
  std::size_t dynamic_matches = 0;
  std::size_t bank_matches = 0;
  std::size_t fresh_tracks = 0;
  double refine_seconds = 0.0;
  double static_seconds = 0.0;
  double dynamic_seconds = 0.0;
  double bank_seconds = 0.0;
};

// Thing segments of a scan, grouped by raw instance id, ascending.
std::vector<InstanceSegment> extract_segments(
    const Scan& scan, const std::unordered_set<uint32_t>& thing_classes = {});

// Cartesian product of src x dst restricted to equal class_id.
std::vector<CandidatePair> build_candidates(const std::vector<InstanceSegment>& src,
                                            const std::vector<InstanceSegment>& dst);

// Sequence-level association: per scan, current segments are matched against
// the previous frame (static gates first, then registration + assignment),
// leftovers consult the memory bank, and whatever remains starts a new track.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {});

  void reset();

  // Associates one scan (the next frame) and returns one global id per point,
  // 0 for non-instance points. Stateful; call on consecutive frames.
  std::vector<uint32_t> step(const Scan& scan);

  std::vector<std::vector<uint32_t>> run_sequence(const std::vector<Scan>& scans);

  const std::vector<BankEntry>& bank() const { return bank_; }
  int frames_seen() const { return frame_; }
  const StageStats& stats() const { return stats_; }

 private:
  TrackerConfig cfg_;
  std::vector<InstanceSegment> prev_;  // instance_id holds the global id
  std::vector<BankEntry> bank_;
  uint32_t next_id_ = 1;
  int frame_ = 0;
  StageStats stats_;
};

}  // namespace icp4d
