#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

// Pairwise squared Euclidean transport costs, row-major (rows = src points).
struct CostMatrix {
  std::vector<double> z;
  std::size_t rows = 0, cols = 0;

  double at(std::size_t i, std::size_t j) const { return z[i * cols + j]; }
};

// Throws EmptySegment when either side is empty.
CostMatrix build_cost(const std::vector<Point3>& src, const std::vector<Point3>& dst);

struct SinkhornOptions {
  double epsilon = 0.2;
  int max_iters = 200;
  double tol = 1e-6;  // max marginal violation
  // Divide the cost by its maximum entry before solving, so one epsilon has a
  // consistent meaning across instance scales. epsilon then acts on the
  // normalized cost.
  bool normalize_cost = true;
  // Skip materializing the dense plan (duals, argmax and masses still filled);
  // the registration loop uses this.
  bool materialize_plan = false;
  // Optional dual warm start in the solver's scaled domain (phi/psi of a
  // previous solve over same-shaped inputs).
  std::vector<double> warm_phi, warm_psi;
  // Overrelaxation factor for the row-potential update, in [1, 2). At 1 the
  // update is the plain coordinate-ascent step and the dual objective trace
  // ascends monotonically; factors around 1.8 roughly halve the iteration
  // count at the price of that diagnostic. The column step stays plain, so
  // column marginals remain exact by construction and the reported violation
  // keeps its meaning. The converged plan is the same either way (same fixed
  // point, same tolerance).
  double overrelaxation = 1.0;
};

// Entropy-regularized coupling with uniform marginals, solved in the log
// domain (never NaN, total for any finite cost scale).
struct TransportPlan {
  std::vector<double> q;  // row-major, empty unless materialized
  std::size_t rows = 0, cols = 0;
  double row_marginal = 0.0, col_marginal = 0.0;  // uniform targets 1/rows, 1/cols
  double epsilon = 0.0;

  // scaled duals of the solved (possibly normalized) cost: Q_ij =
  // exp(phi_i + psi_j - Zn_ij/eps)
  std::vector<double> phi, psi;

  // per-source-row argmax over the coupling (lowest column on ties) and the
  // corresponding plan mass; this is the soft-correspondence rule
  std::vector<int32_t> row_argmax;
  std::vector<double> row_maxmass;

  int iterations = 0;
  bool converged = false;
  double max_marginal_violation = 0.0;

  // Per-iteration diagnostics. The dual objective <f,r>+<g,c>-eps*sum(Q) is
  // the quantity Sinkhorn's coordinate-ascent iteration actually improves
  // monotonically; the primal <Z,Q>-eps*H(Q) evaluated at the infeasible
  // iterates is recorded for inspection but is monotone in neither direction.
  std::vector<double> dual_objective_trace;
  std::vector<double> primal_objective_trace;
  std::vector<double> violation_trace;

  double at(std::size_t i, std::size_t j) const { return q[i * cols + j]; }
};

TransportPlan sinkhorn(const CostMatrix& cost, const SinkhornOptions& opt);

// Convenience form: defaults with the plan materialized.
TransportPlan sinkhorn(const CostMatrix& cost, double epsilon, int max_iters = 200,
                       double tol = 1e-6);

// One pair per source row: (row, argmax of that row), ties to the lowest
// column index.
std::vector<std::pair<int, int>> soft_correspondences(const TransportPlan& plan);

}  // namespace icp4d
