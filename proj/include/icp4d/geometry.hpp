#pragma once

#include <utility>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d {

std::vector<Point3> apply_transform(const RigidTransform& t, const std::vector<Point3>& p);

// compose(a, b) applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

// Rotation angle in [0, pi] from the trace; the axis-angle vector theta with
// ||theta|| = angle recovered from the skew-symmetric part.
double rotation_angle(const Mat3& r);
Vec3 axis_angle(const Mat3& r);

bool is_rotation(const Mat3& r, double tol = 1e-9);

// Mean and population covariance (1/n). Single point yields the zero matrix.
// Throws EmptySegment on empty input.
std::pair<Vec3, Mat3> segment_statistics(const std::vector<Point3>& points);

InstanceSegment make_segment(uint32_t instance_id, uint32_t class_id, std::vector<Point3> points);

}  // namespace icp4d
