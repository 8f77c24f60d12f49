#pragma once

#include <cmath>
#include <vector>

#include "icp4d/geometry.hpp"
#include "icp4d/rng.hpp"
#include "icp4d/types.hpp"

namespace icp4d::testing {

inline std::vector<Point3> random_points(Rng& rng, std::size_t n, double extent = 2.0) {
  std::vector<Point3> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    pts.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent),
                   rng.uniform(-extent, extent)});
  return pts;
}

// rotation about a uniformly random axis by a uniform angle in [0, max_angle]
inline Mat3 random_rotation(Rng& rng, double max_angle) {
  Vec3 axis{rng.gaussian(), rng.gaussian(), rng.gaussian()};
  double n = axis.norm();
  if (n < 1e-12) {
    axis = {0, 0, 1};
    n = 1.0;
  }
  axis = axis * (1.0 / n);
  const double a = rng.uniform(0.0, max_angle);
  const double c = std::cos(a), s = std::sin(a), t = 1.0 - c;
  Mat3 r;
  r.m[0][0] = t * axis.x * axis.x + c;
  r.m[0][1] = t * axis.x * axis.y - s * axis.z;
  r.m[0][2] = t * axis.x * axis.z + s * axis.y;
  r.m[1][0] = t * axis.x * axis.y + s * axis.z;
  r.m[1][1] = t * axis.y * axis.y + c;
  r.m[1][2] = t * axis.y * axis.z - s * axis.x;
  r.m[2][0] = t * axis.x * axis.z - s * axis.y;
  r.m[2][1] = t * axis.y * axis.z + s * axis.x;
  r.m[2][2] = t * axis.z * axis.z + c;
  return r;
}

inline double mat_diff(const Mat3& a, const Mat3& b) { return (a - b).frobenius_norm(); }

inline double vec_diff(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// rotation distance as an angle
inline double rot_error(const Mat3& a, const Mat3& b) {
  return rotation_angle(a.transposed() * b);
}

}  // namespace icp4d::testing
