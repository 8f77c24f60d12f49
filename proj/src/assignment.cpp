#include "icp4d/assignment.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <tuple>

#include "icp4d/geometry.hpp"

namespace icp4d {

std::vector<CostEntry> build_cost(const std::vector<AcceptedMatch>& accepted,
                                  const AssignmentConfig& cfg) {
  std::vector<CostEntry> table;
  table.reserve(accepted.size());
  double max_t = 0.0, max_r = 0.0;
  for (const AcceptedMatch& m : accepted) {
    CostEntry e;
    e.src_id = m.src_id;
    e.dst_id = m.dst_id;
    e.iou = m.iou;
    e.cost.c_t = m.transform.translation.norm();
    e.cost.c_r = rotation_angle(m.transform.rotation);
    e.cost.c_s = 1.0 - m.iou;
    e.cost.gamma_t = cfg.gamma_t;
    e.cost.gamma_r = cfg.gamma_r;
    e.cost.gamma_s = cfg.gamma_s;
    max_t = std::max(max_t, e.cost.c_t);
    max_r = std::max(max_r, e.cost.c_r);
    table.push_back(e);
  }
  const bool per_frame = cfg.normalization == AssignmentConfig::Normalization::kPerFrameMax;
  const double scale_t = per_frame ? max_t : cfg.translation_scale;
  const double scale_r = per_frame ? max_r : cfg.rotation_scale;
  for (CostEntry& e : table) {
    e.cost.c_t = scale_t > 0.0 ? e.cost.c_t / scale_t : 0.0;
    e.cost.c_r = scale_r > 0.0 ? e.cost.c_r / scale_r : 0.0;
  }
  return table;
}

Assignment assign_greedy(const std::vector<CostEntry>& table) {
  std::vector<const CostEntry*> order;
  order.reserve(table.size());
  for (const CostEntry& e : table) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const CostEntry* a, const CostEntry* b) {
    return std::make_tuple(-a->iou, a->cost.total(), a->src_id, a->dst_id) <
           std::make_tuple(-b->iou, b->cost.total(), b->src_id, b->dst_id);
  });

  Assignment out;
  std::vector<uint32_t> used_src, used_dst;
  for (const CostEntry* e : order) {
    if (std::find(used_src.begin(), used_src.end(), e->src_id) != used_src.end()) continue;
    if (std::find(used_dst.begin(), used_dst.end(), e->dst_id) != used_dst.end()) continue;
    used_src.push_back(e->src_id);
    used_dst.push_back(e->dst_id);
    out.push_back({e->src_id, e->dst_id});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Jonker-Volgenant style shortest-augmenting-path assignment with potentials,
// O(n^3) on the sentinel-padded square matrix. 1-based internally.
std::vector<int> hungarian_min_cost(const std::vector<std::vector<double>>& cost,
                                    double sentinel) {
  const std::size_t rows = cost.size();
  const std::size_t cols = rows == 0 ? 0 : cost[0].size();
  const std::size_t n = std::max(rows, cols);
  if (n == 0) return {};

  auto at = [&](std::size_t i, std::size_t j) -> double {
    if (i < rows && j < cols) return std::min(cost[i][j], sentinel);
    return sentinel;
  };

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> row_of_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    row_of_col[0] = static_cast<int>(i);
    std::size_t j0 = 0;
    minv.assign(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = static_cast<std::size_t>(row_of_col[j0]);
      std::size_t j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = static_cast<int>(j0);
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[static_cast<std::size_t>(row_of_col[j])] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (row_of_col[j0] != 0);
    do {
      const std::size_t j1 = static_cast<std::size_t>(way[j0]);
      row_of_col[j0] = row_of_col[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> col_of_row(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = static_cast<std::size_t>(row_of_col[j]);
    if (i == 0 || i > rows || j > cols) continue;
    if (cost[i - 1][j - 1] >= sentinel) continue;  // forbidden pair: unmatched
    col_of_row[i - 1] = static_cast<int>(j - 1);
  }
  return col_of_row;
}

Assignment assign_hungarian(const std::vector<CostEntry>& table) {
  // id-indexed dense table; absent pairs are forbidden
  std::map<uint32_t, std::size_t> src_index, dst_index;
  for (const CostEntry& e : table) {
    src_index.emplace(e.src_id, 0);
    dst_index.emplace(e.dst_id, 0);
  }
  std::size_t k = 0;
  std::vector<uint32_t> src_ids, dst_ids;
  for (auto& [id, idx] : src_index) {
    idx = k++;
    src_ids.push_back(id);
  }
  k = 0;
  for (auto& [id, idx] : dst_index) {
    idx = k++;
    dst_ids.push_back(id);
  }

  std::vector<std::vector<double>> dense(src_ids.size(),
                                         std::vector<double>(dst_ids.size(), kSentinelCost));
  for (const CostEntry& e : table)
    dense[src_index[e.src_id]][dst_index[e.dst_id]] =
        std::min(e.cost.total(), kSentinelCost);

  const std::vector<int> col_of_row = hungarian_min_cost(dense, kSentinelCost);
  Assignment out;
  for (std::size_t i = 0; i < col_of_row.size(); ++i)
    if (col_of_row[i] >= 0)
      out.push_back({src_ids[i], dst_ids[static_cast<std::size_t>(col_of_row[i])]});
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace icp4d
