#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace icp4d {

// One scan's worth of ground truth and prediction, aligned point by point.
// Instance id 0 means "not a thing point"; nonzero instance ids define the
// per-frame masks and, chained over frames, the sequence-level tracks.
struct EvalFrame {
  std::vector<uint32_t> gt_semantic;
  std::vector<uint32_t> gt_instance;
  std::vector<uint32_t> pred_semantic;
  std::vector<uint32_t> pred_instance;
};

struct MetricReport {
  double lstq = 0.0;
  double s_assoc = 0.0;
  double s_cls = 0.0;
  std::map<uint32_t, double> class_iou;  // classes present in gt or pred
  double motsa = 0.0;
  double smotsa = 0.0;
  double ptq = 0.0;
  double sptq = 0.0;
  int id_switches = 0;
  std::size_t tp = 0, fp = 0, fn = 0;  // thing-mask counts at IoU > 0.5
};

// Dataset-level semantic quality: per-class point counts are accumulated over
// all frames, then intersection-over-union is averaged across the classes
// that appear in ground truth or prediction (none present -> 0).
std::pair<double, std::map<uint32_t, double>> s_cls(const std::vector<EvalFrame>& frames);

// Association quality over sequence-level tracks: for every ground-truth
// track, each overlapping predicted track contributes its overlap size times
// the track-level IoU; the sum is normalized by the track size and averaged
// over ground-truth tracks. Class-blind.
double s_assoc(const std::vector<EvalFrame>& frames);

// Mask-level tracking accuracy. Per frame, masks are matched at IoU above the
// threshold (such matches are mutually unique); an identity switch is a
// ground-truth track whose matched prediction id differs from the one at its
// most recent previously matched frame. Returns {motsa, smotsa}; no
// ground-truth masks at all -> {0, 0}.
std::pair<double, double> motsa(const std::vector<EvalFrame>& frames,
                                double iou_threshold = 0.5);

// Panoptic tracking quality with the PQ-style denominator, averaged over the
// classes carried by thing masks (majority semantic vote per mask, ties to
// the lower class id). Returns {ptq, sptq}; no masks at all -> {0, 0}.
std::pair<double, double> ptq(const std::vector<EvalFrame>& frames, double iou_threshold = 0.5);

// Everything above in one report, with lstq = sqrt(s_cls * s_assoc).
MetricReport evaluate(const std::vector<EvalFrame>& frames);

}  // namespace icp4d
