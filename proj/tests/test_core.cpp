#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "icp4d/geometry.hpp"
#include "icp4d/rng.hpp"

using namespace icp4d;
using namespace icp4d::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDeg = kPi / 180.0;
}  // namespace

TEST_SUITE_BEGIN("core");

TEST_CASE("apply_transform examples") {
  RigidTransform id;
  std::vector<Point3> p{{0.3, -1.2, 4.0}, {0, 0, 0}};
  auto out = apply_transform(id, p);
  CHECK(vec_diff(out[0], p[0]) == 0.0);
  CHECK(vec_diff(out[1], p[1]) == 0.0);

  RigidTransform shift;
  shift.translation = {1, 0, 0};
  out = apply_transform(shift, {{0, 0, 0}});
  CHECK(vec_diff(out[0], {1, 0, 0}) == 0.0);

  RigidTransform rz;
  rz.rotation = rot_z(90.0 * kDeg);
  out = apply_transform(rz, {{1, 0, 0}});
  CHECK(vec_diff(out[0], {0, 1, 0}) < 1e-12);
}

TEST_CASE("apply_transform is an isometry") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    RigidTransform t;
    t.rotation = random_rotation(rng, kPi);
    t.translation = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    auto pts = random_points(rng, 16);
    auto moved = apply_transform(t, pts);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        CHECK(std::abs((pts[i] - pts[j]).norm() - (moved[i] - moved[j]).norm()) < 1e-9);
  }
}

TEST_CASE("compose examples and properties") {
  Rng rng(102);
  RigidTransform x;
  x.rotation = random_rotation(rng, kPi);
  x.translation = {0.4, -2.0, 1.0};

  RigidTransform c = compose(RigidTransform{}, x);
  CHECK(mat_diff(c.rotation, x.rotation) == 0.0);
  CHECK(vec_diff(c.translation, x.translation) == 0.0);

  RigidTransform roundtrip = compose(x, inverse(x));
  CHECK(mat_diff(roundtrip.rotation, Mat3::identity()) < 1e-9);
  CHECK(roundtrip.translation.norm() < 1e-9);

  // rotation part of Rz(30)∘Rz(60) against the direct 3x3 product
  RigidTransform a, b;
  a.rotation = rot_z(30.0 * kDeg);
  a.translation = {1, 2, 3};
  b.rotation = rot_z(60.0 * kDeg);
  b.translation = {-0.5, 0, 2};
  const Mat3 product = a.rotation * b.rotation;
  RigidTransform ab = compose(a, b);
  CHECK(mat_diff(ab.rotation, rot_z(90.0 * kDeg)) < 1e-9);
  CHECK(mat_diff(ab.rotation, product) == 0.0);

  // defining property: compose(a,b) applied = a applied after b
  auto pts = random_points(rng, 8);
  auto one = apply_transform(ab, pts);
  auto two = apply_transform(a, apply_transform(b, pts));
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(vec_diff(one[i], two[i]) < 1e-12);
}

TEST_CASE("compose is associative") {
  Rng rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    RigidTransform a, b, c;
    a.rotation = random_rotation(rng, kPi);
    b.rotation = random_rotation(rng, kPi);
    c.rotation = random_rotation(rng, kPi);
    a.translation = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    b.translation = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    c.translation = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    RigidTransform left = compose(compose(a, b), c);
    RigidTransform right = compose(a, compose(b, c));
    CHECK(mat_diff(left.rotation, right.rotation) < 1e-9);
    CHECK(vec_diff(left.translation, right.translation) < 1e-9);
  }
}

TEST_CASE("segment_statistics examples") {
  auto [mean, cov] = segment_statistics({{0, 0, 0}, {2, 0, 0}});
  CHECK(vec_diff(mean, {1, 0, 0}) == 0.0);
  Mat3 expected = Mat3::zero();
  expected.m[0][0] = 1.0;
  CHECK(mat_diff(cov, expected) == 0.0);

  auto [m1, c1] = segment_statistics({{5, 5, 5}});
  CHECK(vec_diff(m1, {5, 5, 5}) == 0.0);
  CHECK(c1.frobenius_norm() == 0.0);

  Rng rng(104);
  auto pts = random_points(rng, 32);
  auto shifted = pts;
  for (auto& p : shifted) p += Point3{3, 0, 0};
  auto [ma, ca] = segment_statistics(pts);
  auto [mb, cb] = segment_statistics(shifted);
  CHECK(mat_diff(ca, cb) < 1e-12);
  CHECK(vec_diff(mb, ma + Point3{3, 0, 0}) < 1e-12);

  CHECK_THROWS_AS(segment_statistics({}), EmptySegment);
}

TEST_CASE("covariance conjugates under rotation") {
  Rng rng(105);
  for (int trial = 0; trial < 20; ++trial) {
    auto pts = random_points(rng, 24);
    RigidTransform t;
    t.rotation = random_rotation(rng, kPi);
    t.translation = {rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4)};
    auto moved = apply_transform(t, pts);
    auto [m0, c0] = segment_statistics(pts);
    auto [m1, c1] = segment_statistics(moved);
    const Mat3 conj = t.rotation * c0 * t.rotation.transposed();
    CHECK(mat_diff(c1, conj) < 1e-9);
    CHECK(vec_diff(m1, t(m0)) < 1e-9);
  }
}

TEST_CASE("segment covariance invariants") {
  Rng rng(106);
  for (int trial = 0; trial < 10; ++trial) {
    auto seg = make_segment(1, 1, random_points(rng, 12));
    CHECK(mat_diff(seg.covariance, seg.covariance.transposed()) < 1e-12);
    // PSD via quadratic forms on random directions
    for (int k = 0; k < 8; ++k) {
      Vec3 d{rng.gaussian(), rng.gaussian(), rng.gaussian()};
      CHECK(d.dot(seg.covariance * d) >= -1e-9);
    }
  }
}

TEST_CASE("rotation helpers") {
  CHECK(rotation_angle(rot_z(90.0 * kDeg)) == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(axis_angle(rot_z(90.0 * kDeg)).norm() == doctest::Approx(kPi / 2).epsilon(1e-12));
  Vec3 aa = axis_angle(rot_z(0.3));
  CHECK(std::abs(aa.z - 0.3) < 1e-12);
  CHECK(is_rotation(rot_z(1.234)));
  Mat3 reflect = Mat3::identity();
  reflect.m[2][2] = -1.0;
  CHECK(!is_rotation(reflect));

  Rng rng(107);
  for (int trial = 0; trial < 20; ++trial) {
    Mat3 r = random_rotation(rng, kPi);
    CHECK(is_rotation(r, 1e-9));
    Vec3 v = axis_angle(r);
    CHECK(v.norm() == doctest::Approx(rotation_angle(r)).epsilon(1e-9));
  }
}

TEST_SUITE_END();
