#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "icp4d/metrics.hpp"

namespace icp4d::testing {

// Straightforward-loop evaluator sharing no code with the production metrics:
// every overlap is recounted from scratch with nested scans over the raw
// arrays. Intended for tiny sequences only.
struct MetricsOracleResult {
  double s_cls = 0.0;
  double s_assoc = 0.0;
  double lstq = 0.0;
  double motsa = 0.0;
  double smotsa = 0.0;
  double ptq = 0.0;
  double sptq = 0.0;
  int id_switches = 0;
  std::size_t tp = 0, fp = 0, fn = 0;
  std::map<uint32_t, double> class_iou;
};

MetricsOracleResult oracle_metrics(const std::vector<EvalFrame>& frames);

}  // namespace icp4d::testing
