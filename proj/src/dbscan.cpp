#include "icp4d/dbscan.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace icp4d {

std::vector<int> dbscan_labels(const std::vector<Point3>& points, double eps, int min_points) {
  if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
  if (min_points < 1) throw std::invalid_argument("min_points must be at least 1");

  constexpr int kUnvisited = -2, kNoise = -1;
  const double eps2 = eps * eps;
  const std::size_t n = points.size();
  std::vector<int> label(n, kUnvisited);

  auto neighbors_of = [&](std::size_t i) {
    std::vector<std::size_t> nb;
    for (std::size_t j = 0; j < n; ++j)
      if ((points[j] - points[i]).squared_norm() <= eps2) nb.push_back(j);
    return nb;
  };

  int next_cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    std::vector<std::size_t> seeds = neighbors_of(i);
    if (seeds.size() < static_cast<std::size_t>(min_points)) {
      label[i] = kNoise;
      continue;
    }
    const int cluster = next_cluster++;
    label[i] = cluster;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const std::size_t j = seeds[k];
      if (label[j] == kNoise) label[j] = cluster;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = cluster;
      const std::vector<std::size_t> nb = neighbors_of(j);
      if (nb.size() >= static_cast<std::size_t>(min_points))
        seeds.insert(seeds.end(), nb.begin(), nb.end());
    }
  }
  return label;
}

Scan refine_dbscan(const Scan& scan, double eps, int min_points) {
  // per-instance point index lists, in ascending id order
  std::map<uint32_t, std::vector<std::size_t>> members;
  uint32_t max_id = 0;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const uint32_t id = scan.instance[i];
    if (id == 0) continue;
    members[id].push_back(i);
    max_id = std::max(max_id, id);
  }

  Scan out = scan;
  uint32_t next_id = max_id + 1;
  for (const auto& [id, idx] : members) {
    std::vector<Point3> pts;
    pts.reserve(idx.size());
    for (std::size_t i : idx) pts.push_back(scan.points[i]);
    const std::vector<int> label = dbscan_labels(pts, eps, min_points);

    int clusters = 0;
    for (int l : label) clusters = std::max(clusters, l + 1);
    std::vector<uint32_t> cluster_id(static_cast<std::size_t>(clusters));
    for (uint32_t& c : cluster_id) c = next_id++;
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (label[k] >= 0) out.instance[idx[k]] = cluster_id[static_cast<std::size_t>(label[k])];
    // noise points keep the parent id
  }
  return out;
}

}  // namespace icp4d
