#include "icp4d/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace icp4d {

std::vector<Point3> apply_transform(const RigidTransform& t, const std::vector<Point3>& p) {
  std::vector<Point3> out;
  out.reserve(p.size());
  for (const Point3& q : p) out.push_back(t(q));
  return out;
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  RigidTransform r;
  r.rotation = a.rotation * b.rotation;
  r.translation = a.rotation * b.translation + a.translation;
  return r;
}

RigidTransform inverse(const RigidTransform& t) {
  RigidTransform r;
  r.rotation = t.rotation.transposed();
  r.translation = (r.rotation * t.translation) * -1.0;
  return r;
}

Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r.m[0][0] = 1; r.m[0][1] = 0; r.m[0][2] = 0;
  r.m[1][0] = 0; r.m[1][1] = c; r.m[1][2] = -s;
  r.m[2][0] = 0; r.m[2][1] = s; r.m[2][2] = c;
  return r;
}

Mat3 rot_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r.m[0][0] = c;  r.m[0][1] = 0; r.m[0][2] = s;
  r.m[1][0] = 0;  r.m[1][1] = 1; r.m[1][2] = 0;
  r.m[2][0] = -s; r.m[2][1] = 0; r.m[2][2] = c;
  return r;
}

Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 r;
  r.m[0][0] = c; r.m[0][1] = -s; r.m[0][2] = 0;
  r.m[1][0] = s; r.m[1][1] = c;  r.m[1][2] = 0;
  r.m[2][0] = 0; r.m[2][1] = 0;  r.m[2][2] = 1;
  return r;
}

double rotation_angle(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

Vec3 axis_angle(const Mat3& r) {
  const double angle = rotation_angle(r);
  if (angle < 1e-12) return {0, 0, 0};
  Vec3 axis{r.m[2][1] - r.m[1][2], r.m[0][2] - r.m[2][0], r.m[1][0] - r.m[0][1]};
  const double n = axis.norm();
  if (n < 1e-12) {
    // angle near pi: axis from the diagonal of (R + I) / 2
    Vec3 a{std::sqrt(std::max(0.0, (r.m[0][0] + 1.0) * 0.5)),
           std::sqrt(std::max(0.0, (r.m[1][1] + 1.0) * 0.5)),
           std::sqrt(std::max(0.0, (r.m[2][2] + 1.0) * 0.5))};
    // fix signs against the largest component
    if (a.x >= a.y && a.x >= a.z) {
      a.y = (r.m[0][1] + r.m[1][0]) / (4.0 * (a.x > 0 ? a.x : 1.0));
      a.z = (r.m[0][2] + r.m[2][0]) / (4.0 * (a.x > 0 ? a.x : 1.0));
    } else if (a.y >= a.z) {
      a.x = (r.m[0][1] + r.m[1][0]) / (4.0 * (a.y > 0 ? a.y : 1.0));
      a.z = (r.m[1][2] + r.m[2][1]) / (4.0 * (a.y > 0 ? a.y : 1.0));
    } else {
      a.x = (r.m[0][2] + r.m[2][0]) / (4.0 * (a.z > 0 ? a.z : 1.0));
      a.y = (r.m[1][2] + r.m[2][1]) / (4.0 * (a.z > 0 ? a.z : 1.0));
    }
    const double an = a.norm();
    return a * (angle / (an > 0 ? an : 1.0));
  }
  return axis * (angle / n);
}

bool is_rotation(const Mat3& r, double tol) {
  const Mat3 should_be_i = r.transposed() * r - Mat3::identity();
  return should_be_i.frobenius_norm() <= tol && std::abs(r.det() - 1.0) <= tol;
}

std::pair<Vec3, Mat3> segment_statistics(const std::vector<Point3>& points) {
  if (points.empty()) throw EmptySegment("segment_statistics: no points");
  const double inv_n = 1.0 / static_cast<double>(points.size());
  Vec3 mean{};
  for (const Point3& p : points) mean += p;
  mean = mean * inv_n;
  Mat3 cov = Mat3::zero();
  for (const Point3& p : points) {
    const Vec3 d = p - mean;
    const double v[3] = {d.x, d.y, d.z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) cov.m[i][j] += v[i] * v[j];
  }
  return {mean, cov * inv_n};
}

InstanceSegment make_segment(uint32_t instance_id, uint32_t class_id, std::vector<Point3> points) {
  InstanceSegment seg;
  seg.instance_id = instance_id;
  seg.class_id = class_id;
  seg.points = std::move(points);
  auto [mean, cov] = segment_statistics(seg.points);
  seg.mean = mean;
  seg.covariance = cov;
  return seg;
}

}  // namespace icp4d
