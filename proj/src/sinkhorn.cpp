#include "icp4d/sinkhorn.hpp"

#include <cmath>
#include <stdexcept>

#include "icp4d/kernels.hpp"

namespace icp4d {

CostMatrix build_cost(const std::vector<Point3>& src, const std::vector<Point3>& dst) {
  if (src.empty() || dst.empty()) throw EmptySegment("build_cost: empty side");
  CostMatrix c;
  c.rows = src.size();
  c.cols = dst.size();
  c.z.resize(c.rows * c.cols);
  kernels::Soa a(src), b(dst);
  kernels::active().pairwise_sqdist(a.view(), b.view(), c.z.data());
  return c;
}

TransportPlan sinkhorn(const CostMatrix& cost, const SinkhornOptions& opt) {
  const std::size_t rows = cost.rows, cols = cost.cols;
  if (rows == 0 || cols == 0) throw EmptySegment("sinkhorn: empty cost matrix");
  if (!(opt.epsilon > 0.0)) throw std::invalid_argument("sinkhorn: epsilon must be positive");
  if (!(opt.overrelaxation >= 1.0 && opt.overrelaxation < 2.0))
    throw std::invalid_argument("sinkhorn: overrelaxation must lie in [1, 2)");
  for (double v : cost.z)
    if (!std::isfinite(v)) throw std::invalid_argument("sinkhorn: non-finite cost entry");

  const kernels::Backend& k = kernels::active();

  // scaled cost: Zn / eps, with Zn the max-normalized cost when enabled
  double scale = 1.0;
  if (opt.normalize_cost) {
    double mx = 0.0;
    for (double v : cost.z) mx = std::max(mx, v);
    if (mx > 0.0) scale = mx;
  }
  const double inv_eps_scale = 1.0 / (opt.epsilon * scale);
  std::vector<double> zse(rows * cols);
  for (std::size_t i = 0; i < zse.size(); ++i) zse[i] = cost.z[i] * inv_eps_scale;

  TransportPlan plan;
  plan.rows = rows;
  plan.cols = cols;
  plan.epsilon = opt.epsilon;
  plan.row_marginal = 1.0 / static_cast<double>(rows);
  plan.col_marginal = 1.0 / static_cast<double>(cols);
  const double log_r = -std::log(static_cast<double>(rows));
  const double log_c = -std::log(static_cast<double>(cols));

  std::vector<double>& phi = plan.phi;
  std::vector<double>& psi = plan.psi;
  phi = opt.warm_phi.size() == rows ? opt.warm_phi : std::vector<double>(rows, 0.0);
  psi = opt.warm_psi.size() == cols ? opt.warm_psi : std::vector<double>(cols, 0.0);

  std::vector<double> lr(rows), lc(cols), rowsum(rows);
  const int max_iters = std::max(opt.max_iters, 0);
  plan.dual_objective_trace.reserve(max_iters);
  plan.primal_objective_trace.reserve(max_iters);
  plan.violation_trace.reserve(max_iters);

  k.lse_rows(zse.data(), rows, cols, psi.data(), lr.data());
  const double omega = opt.overrelaxation;
  double viol = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    if (omega == 1.0) {
      for (std::size_t i = 0; i < rows; ++i) phi[i] = log_r - lr[i];
    } else {
      for (std::size_t i = 0; i < rows; ++i)
        phi[i] = omega * (log_r - lr[i]) + (1.0 - omega) * phi[i];
    }
    k.lse_cols(zse.data(), rows, cols, phi.data(), lc.data());
    for (std::size_t j = 0; j < cols; ++j) psi[j] = log_c - lc[j];
    plan.iterations = it + 1;

    // row sums of the current coupling (column sums are exact by
    // construction); this lse pass doubles as the next row update
    k.lse_rows(zse.data(), rows, cols, psi.data(), lr.data());
    viol = 0.0;
    double mass = 0.0, phi_dot_rowsum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
      rowsum[i] = std::exp(phi[i] + lr[i]);
      mass += rowsum[i];
      phi_dot_rowsum += phi[i] * rowsum[i];
      viol = std::max(viol, std::abs(rowsum[i] - plan.row_marginal));
    }

    double phi_dot_r = 0.0, psi_dot_c = 0.0, psi_dot_colsum = 0.0;
    for (std::size_t i = 0; i < rows; ++i) phi_dot_r += phi[i] * plan.row_marginal;
    for (std::size_t j = 0; j < cols; ++j) {
      psi_dot_c += psi[j] * plan.col_marginal;
      psi_dot_colsum += psi[j] * plan.col_marginal;  // column sums equal c here
    }
    const double eps_n = opt.epsilon * scale;  // epsilon of the solved cost, in solver units
    // with Q = exp(phi + psi - Zn/eps_n): <Zn,Q> - eps_n*H(Q) collapses to
    // eps_n*(phi.rowsum + psi.colsum)
    plan.primal_objective_trace.push_back(eps_n * (phi_dot_rowsum + psi_dot_colsum));
    plan.dual_objective_trace.push_back(eps_n * (phi_dot_r + psi_dot_c - mass));
    plan.violation_trace.push_back(viol);

    if (viol < opt.tol) {
      plan.converged = true;
      break;
    }
  }
  plan.max_marginal_violation = viol;

  plan.row_argmax.resize(rows);
  plan.row_maxmass.resize(rows);
  std::vector<double> row_maxexp(rows);
  k.row_max_arg(zse.data(), rows, cols, psi.data(), row_maxexp.data(), plan.row_argmax.data());
  for (std::size_t i = 0; i < rows; ++i) plan.row_maxmass[i] = std::exp(phi[i] + row_maxexp[i]);

  if (opt.materialize_plan) {
    plan.q.resize(rows * cols);
    k.plan_exp(zse.data(), rows, cols, phi.data(), psi.data(), plan.q.data());
  }
  return plan;
}

TransportPlan sinkhorn(const CostMatrix& cost, double epsilon, int max_iters, double tol) {
  SinkhornOptions opt;
  opt.epsilon = epsilon;
  opt.max_iters = max_iters;
  opt.tol = tol;
  opt.materialize_plan = true;
  return sinkhorn(cost, opt);
}

std::vector<std::pair<int, int>> soft_correspondences(const TransportPlan& plan) {
  std::vector<std::pair<int, int>> out;
  out.reserve(plan.rows);
  for (std::size_t i = 0; i < plan.rows; ++i)
    out.emplace_back(static_cast<int>(i), plan.row_argmax[i]);
  return out;
}

}  // namespace icp4d
