#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace icp4d {

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Point3 operator+(const Point3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Point3 operator-(const Point3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Point3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Point3& operator+=(const Point3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  double dot(const Point3& o) const { return x * o.x + y * o.y + z * o.z; }
  Point3 cross(const Point3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
};

using Vec3 = Point3;

struct Mat3 {
  // row-major
  double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  static Mat3 identity() { return {}; }
  static Mat3 zero() {
    Mat3 r;
    for (auto& row : r.m)
      for (double& v : row) v = 0.0;
    return r;
  }

  double* operator[](int i) { return m[i]; }
  const double* operator[](int i) const { return m[i]; }

  Mat3 operator*(const Mat3& o) const {
    Mat3 r = zero();
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j) r.m[i][j] += m[i][k] * o.m[k][j];
    return r;
  }
  Vec3 operator*(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
  Mat3 operator+(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
    return r;
  }
  Mat3 operator-(const Mat3& o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
    return r;
  }
  Mat3 operator*(double s) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] * s;
    return r;
  }

  Mat3 transposed() const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
  }
  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
  double trace() const { return m[0][0] + m[1][1] + m[2][2]; }
  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& row : m)
      for (double v : row) s += v * v;
    return std::sqrt(s);
  }
};

struct RigidTransform {
  Mat3 rotation;      // orthonormal, det +1
  Vec3 translation{}; // meters

  Point3 operator()(const Point3& p) const { return rotation * p + translation; }
};

// One LiDAR frame in world coordinates. Instance id 0 means "not an instance"
// (stuff point); ids > 0 must fall on thing classes.
struct Scan {
  std::vector<Point3> points;
  std::vector<uint32_t> semantic;
  std::vector<uint32_t> instance;
  int frame_index = 0;

  std::size_t size() const { return points.size(); }
};

// Point subset of one predicted instance with cached first- and second-order
// statistics (population covariance, zero matrix for single-point segments).
struct InstanceSegment {
  uint32_t instance_id = 0;
  uint32_t class_id = 0;
  std::vector<Point3> points;
  Vec3 mean{};
  Mat3 covariance = Mat3::zero();
};

struct EmptySegment : std::runtime_error {
  EmptySegment() : std::runtime_error("empty segment") {}
  explicit EmptySegment(const std::string& what) : std::runtime_error(what) {}
};
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};
struct OverflowError : std::runtime_error {
  explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace icp4d
