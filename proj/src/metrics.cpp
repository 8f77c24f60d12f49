#include "icp4d/metrics.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace icp4d {
namespace {

void validate(const std::vector<EvalFrame>& frames) {
  for (const EvalFrame& f : frames) {
    const std::size_t n = f.gt_semantic.size();
    if (f.gt_instance.size() != n || f.pred_semantic.size() != n ||
        f.pred_instance.size() != n)
      throw std::invalid_argument("EvalFrame arrays must have equal lengths");
  }
}

struct Mask {
  std::size_t size = 0;
  std::map<uint32_t, std::size_t> class_count;
};

// Majority semantic label over the mask's points; ties go to the lower class.
uint32_t majority_class(const Mask& m) {
  uint32_t best = 0;
  std::size_t best_count = 0;
  for (const auto& [c, count] : m.class_count)
    if (count > best_count) {
      best_count = count;
      best = c;
    }
  return best;
}

// One frame's thing masks and their pairwise overlap counts, grouped in a
// single pass over the points.
struct FrameMasks {
  std::map<uint32_t, Mask> gt, pred;
  std::map<uint32_t, std::map<uint32_t, std::size_t>> overlap;  // gt -> pred
};

FrameMasks group_frame(const EvalFrame& f) {
  FrameMasks fm;
  for (std::size_t i = 0; i < f.gt_instance.size(); ++i) {
    const uint32_t g = f.gt_instance[i];
    const uint32_t p = f.pred_instance[i];
    if (g > 0) {
      Mask& m = fm.gt[g];
      ++m.size;
      ++m.class_count[f.gt_semantic[i]];
    }
    if (p > 0) {
      Mask& m = fm.pred[p];
      ++m.size;
      ++m.class_count[f.pred_semantic[i]];
    }
    if (g > 0 && p > 0) ++fm.overlap[g][p];
  }
  return fm;
}

struct ClassAcc {
  std::size_t tp = 0, fp = 0, fn = 0;
  double iou_sum = 0.0;
  int idsw = 0;
  double sidsw = 0.0;
};

struct MatchStats {
  std::size_t n_gt_masks = 0;
  std::size_t tp = 0, fp = 0, fn = 0;
  int idsw = 0;
  double matched_iou_sum = 0.0;
  std::map<uint32_t, ClassAcc> per_class;
};

// Per-frame mask matching at IoU > thr (mutually unique for thr >= 0.5) with
// identity switches judged against each ground-truth track's most recent
// matched frame. Masks are visited in ascending id order so double sums are
// reproducible.
MatchStats run_matching(const std::vector<EvalFrame>& frames, double thr) {
  MatchStats st;
  std::map<uint32_t, uint32_t> last_pred;
  for (const EvalFrame& f : frames) {
    const FrameMasks fm = group_frame(f);
    st.n_gt_masks += fm.gt.size();
    std::set<uint32_t> used_pred;
    for (const auto& [t, tm] : fm.gt) {
      const uint32_t t_class = majority_class(tm);
      bool matched = false;
      const auto ov = fm.overlap.find(t);
      if (ov != fm.overlap.end()) {
        for (const auto& [s, inter] : ov->second) {
          const std::size_t uni = tm.size + fm.pred.at(s).size - inter;
          const double iou = static_cast<double>(inter) / static_cast<double>(uni);
          if (iou > thr) {
            matched = true;
            used_pred.insert(s);
            ++st.tp;
            st.matched_iou_sum += iou;
            ClassAcc& acc = st.per_class[t_class];
            ++acc.tp;
            acc.iou_sum += iou;
            const auto it = last_pred.find(t);
            if (it != last_pred.end() && it->second != s) {
              ++st.idsw;
              ++acc.idsw;
              acc.sidsw += iou;
            }
            last_pred[t] = s;
            break;
          }
        }
      }
      if (!matched) {
        ++st.fn;
        ++st.per_class[t_class].fn;
      }
    }
    for (const auto& [s, sm] : fm.pred)
      if (used_pred.count(s) == 0) {
        ++st.fp;
        ++st.per_class[majority_class(sm)].fp;
      }
  }
  return st;
}

}  // namespace

std::pair<double, std::map<uint32_t, double>> s_cls(const std::vector<EvalFrame>& frames) {
  validate(frames);
  struct Counts {
    std::size_t tp = 0, fn = 0, fp = 0;
  };
  std::map<uint32_t, Counts> counts;
  for (const EvalFrame& f : frames)
    for (std::size_t i = 0; i < f.gt_semantic.size(); ++i) {
      const uint32_t g = f.gt_semantic[i];
      const uint32_t p = f.pred_semantic[i];
      if (g == p) {
        ++counts[g].tp;
      } else {
        ++counts[g].fn;
        ++counts[p].fp;
      }
    }
  std::map<uint32_t, double> per_class;
  double sum = 0.0;
  for (const auto& [c, k] : counts) {
    const std::size_t denom = k.tp + k.fn + k.fp;
    const double iou =
        denom == 0 ? 0.0 : static_cast<double>(k.tp) / static_cast<double>(denom);
    per_class[c] = iou;
    sum += iou;
  }
  const double mean =
      counts.empty() ? 0.0 : sum / static_cast<double>(counts.size());
  return {mean, per_class};
}

double s_assoc(const std::vector<EvalFrame>& frames) {
  validate(frames);
  std::map<uint32_t, std::size_t> gt_size, pred_size;
  std::map<uint32_t, std::map<uint32_t, std::size_t>> inter;  // gt -> pred
  for (const EvalFrame& f : frames)
    for (std::size_t i = 0; i < f.gt_instance.size(); ++i) {
      const uint32_t t = f.gt_instance[i];
      const uint32_t s = f.pred_instance[i];
      if (t > 0) ++gt_size[t];
      if (s > 0) ++pred_size[s];
      if (t > 0 && s > 0) ++inter[t][s];
    }
  double total = 0.0;
  for (const auto& [t, t_size] : gt_size) {
    double acc = 0.0;
    const auto row = inter.find(t);
    if (row != inter.end())
      for (const auto& [s, n] : row->second) {
        const std::size_t uni = t_size + pred_size.at(s) - n;
        const double iou = static_cast<double>(n) / static_cast<double>(uni);
        acc += static_cast<double>(n) * iou;
      }
    total += acc / static_cast<double>(t_size);
  }
  return gt_size.empty() ? 0.0 : total / static_cast<double>(gt_size.size());
}

std::pair<double, double> motsa(const std::vector<EvalFrame>& frames,
                                double iou_threshold) {
  validate(frames);
  const MatchStats st = run_matching(frames, iou_threshold);
  if (st.n_gt_masks == 0) return {0.0, 0.0};
  const double m = static_cast<double>(st.n_gt_masks);
  const double hard = (static_cast<double>(st.tp) - static_cast<double>(st.fp) -
                       static_cast<double>(st.idsw)) /
                      m;
  const double soft = (st.matched_iou_sum - static_cast<double>(st.fp) -
                       static_cast<double>(st.idsw)) /
                      m;
  return {hard, soft};
}

std::pair<double, double> ptq(const std::vector<EvalFrame>& frames, double iou_threshold) {
  validate(frames);
  const MatchStats st = run_matching(frames, iou_threshold);
  if (st.per_class.empty()) return {0.0, 0.0};
  double ptq_sum = 0.0, sptq_sum = 0.0;
  for (const auto& [c, acc] : st.per_class) {
    const double denom = static_cast<double>(acc.tp) +
                         0.5 * static_cast<double>(acc.fp) +
                         0.5 * static_cast<double>(acc.fn);
    ptq_sum += (acc.iou_sum - static_cast<double>(acc.idsw)) / denom;
    sptq_sum += (acc.iou_sum - acc.sidsw) / denom;
  }
  const double n = static_cast<double>(st.per_class.size());
  return {ptq_sum / n, sptq_sum / n};
}

MetricReport evaluate(const std::vector<EvalFrame>& frames) {
  validate(frames);
  MetricReport report;
  const auto [cls_mean, per_class] = s_cls(frames);
  report.s_cls = cls_mean;
  report.class_iou = per_class;
  report.s_assoc = s_assoc(frames);
  report.lstq = std::sqrt(report.s_cls * report.s_assoc);
  const auto [hard, soft] = motsa(frames);
  report.motsa = hard;
  report.smotsa = soft;
  const auto [pq, spq] = ptq(frames);
  report.ptq = pq;
  report.sptq = spq;
  const MatchStats st = run_matching(frames, 0.5);
  report.id_switches = st.idsw;
  report.tp = st.tp;
  report.fp = st.fp;
  report.fn = st.fn;
  return report;
}

}  // namespace icp4d
