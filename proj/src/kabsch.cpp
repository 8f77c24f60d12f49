#include "icp4d/kabsch.hpp"

#include <cmath>

#include "icp4d/svd3.hpp"

namespace icp4d {

KabschResult kabsch_update(const std::vector<Point3>& src, const std::vector<Point3>& dst,
                           const std::vector<double>& weights) {
  if (src.empty()) throw EmptySegment("kabsch_update: no correspondences");
  if (src.size() != dst.size()) throw EmptySegment("kabsch_update: size mismatch");

  const std::size_t n = src.size();
  double wsum = 0.0;
  auto weight = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  for (std::size_t i = 0; i < n; ++i) wsum += weight(i);
  const bool uniform = weights.empty() || wsum <= 0.0;
  if (uniform) wsum = static_cast<double>(n);

  Vec3 src_c{}, dst_c{};
  for (std::size_t i = 0; i < n; ++i) {
    const double w = uniform ? 1.0 : weight(i);
    src_c += src[i] * w;
    dst_c += dst[i] * w;
  }
  src_c = src_c * (1.0 / wsum);
  dst_c = dst_c * (1.0 / wsum);

  // weighted cross-covariance (dst x src^T) and source spread
  Mat3 c = Mat3::zero();
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = uniform ? 1.0 : weight(i);
    const Vec3 p = src[i] - src_c;
    const Vec3 q = dst[i] - dst_c;
    spread += w * p.squared_norm();
    const double pv[3] = {p.x, p.y, p.z};
    const double qv[3] = {q.x, q.y, q.z};
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) c.m[r][k] += w * qv[r] * pv[k];
  }

  KabschResult res;
  if (spread / wsum < 1e-24) {
    res.transform.rotation = Mat3::identity();
    res.transform.translation = dst_c - src_c;
    res.degenerate = true;
    return res;
  }

  Mat3 u, v;
  Vec3 s;
  svd3(c, u, s, v);
  const double d = u.det() * v.det();
  Mat3 dm = Mat3::identity();
  dm.m[2][2] = d < 0 ? -1.0 : 1.0;
  res.transform.rotation = u * dm * v.transposed();
  res.transform.translation = dst_c - res.transform.rotation * src_c;
  return res;
}

KabschResult kabsch_update(const std::vector<std::pair<Point3, Point3>>& correspondences) {
  std::vector<Point3> src, dst;
  src.reserve(correspondences.size());
  dst.reserve(correspondences.size());
  for (const auto& [a, b] : correspondences) {
    src.push_back(a);
    dst.push_back(b);
  }
  return kabsch_update(src, dst);
}

}  // namespace icp4d
