#include "icp4d/svd3.hpp"

#include <algorithm>
#include <cmath>

namespace icp4d {
namespace {

double off_diag_norm(const Mat3& a) {
  return std::sqrt(a.m[0][1] * a.m[0][1] + a.m[0][2] * a.m[0][2] + a.m[1][2] * a.m[1][2]);
}

// One Jacobi rotation zeroing a[p][q]; accumulates into v.
void jacobi_rotate(Mat3& a, Mat3& v, int p, int q) {
  const double apq = a.m[p][q];
  if (apq == 0.0) return;
  const double theta = (a.m[q][q] - a.m[p][p]) / (2.0 * apq);
  const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (int k = 0; k < 3; ++k) {
    const double akp = a.m[k][p], akq = a.m[k][q];
    a.m[k][p] = c * akp - s * akq;
    a.m[k][q] = s * akp + c * akq;
  }
  for (int k = 0; k < 3; ++k) {
    const double apk = a.m[p][k], aqk = a.m[q][k];
    a.m[p][k] = c * apk - s * aqk;
    a.m[q][k] = s * apk + c * aqk;
  }
  for (int k = 0; k < 3; ++k) {
    const double vkp = v.m[k][p], vkq = v.m[k][q];
    v.m[k][p] = c * vkp - s * vkq;
    v.m[k][q] = s * vkp + c * vkq;
  }
}

Vec3 column(const Mat3& m, int j) { return {m.m[0][j], m.m[1][j], m.m[2][j]}; }

void set_column(Mat3& m, int j, const Vec3& v) {
  m.m[0][j] = v.x;
  m.m[1][j] = v.y;
  m.m[2][j] = v.z;
}

}  // namespace

void eig_sym3(const Mat3& a_in, Mat3& v, Vec3& w) {
  Mat3 a = a_in;
  // symmetrize defensively
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const double m = 0.5 * (a.m[i][j] + a.m[j][i]);
      a.m[i][j] = m;
      a.m[j][i] = m;
    }
  v = Mat3::identity();
  const double scale = a.frobenius_norm();
  for (int sweep = 0; sweep < 64 && off_diag_norm(a) > 1e-15 * std::max(scale, 1e-300); ++sweep) {
    jacobi_rotate(a, v, 0, 1);
    jacobi_rotate(a, v, 0, 2);
    jacobi_rotate(a, v, 1, 2);
  }
  double lam[3] = {a.m[0][0], a.m[1][1], a.m[2][2]};
  int order[3] = {0, 1, 2};
  std::sort(order, order + 3, [&](int i, int j) { return lam[i] > lam[j]; });
  Mat3 vs;
  for (int j = 0; j < 3; ++j) set_column(vs, j, column(v, order[j]));
  w = {lam[order[0]], lam[order[1]], lam[order[2]]};
  v = vs;
}

void svd3(const Mat3& a, Mat3& u, Vec3& s, Mat3& v) {
  Mat3 ata = a.transposed() * a;
  Vec3 lam;
  eig_sym3(ata, v, lam);
  s = {std::sqrt(std::max(lam.x, 0.0)), std::sqrt(std::max(lam.y, 0.0)),
       std::sqrt(std::max(lam.z, 0.0))};

  // Below ~1e-8 * s_max the eigenpairs of a^T a are rounding noise, and
  // a*v/sigma amplifies it into a column nearly parallel to the dominant
  // ones; treat such directions as null and complete them instead.
  const double tol = 1e-6 * std::max(s.x, 1e-300);
  Vec3 ucol[3];
  int built = 0;
  const double sv[3] = {s.x, s.y, s.z};
  for (int j = 0; j < 3; ++j) {
    if (sv[j] > tol) {
      ucol[j] = (a * column(v, j)) * (1.0 / sv[j]);
      built = j + 1;
    }
  }
  // complete small/zero singular directions to an orthonormal basis
  for (int j = built; j < 3; ++j) {
    Vec3 c;
    if (j == 0) {
      c = {1, 0, 0};
    } else if (j == 1) {
      const Vec3 u0 = ucol[0];
      Vec3 e = std::abs(u0.x) <= std::abs(u0.y) && std::abs(u0.x) <= std::abs(u0.z)
                   ? Vec3{1, 0, 0}
                   : (std::abs(u0.y) <= std::abs(u0.z) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
      c = e - u0 * u0.dot(e);
      c = c * (1.0 / c.norm());
    } else {
      c = ucol[0].cross(ucol[1]);
    }
    ucol[j] = c;
  }
  // one Gram-Schmidt pass guards against drift in the built columns
  for (int j = 0; j < 3; ++j) {
    Vec3 c = ucol[j];
    for (int k = 0; k < j; ++k) c = c - ucol[k] * ucol[k].dot(c);
    const double n = c.norm();
    if (n > 1e-300) c = c * (1.0 / n);
    ucol[j] = c;
  }
  for (int j = 0; j < 3; ++j) set_column(u, j, ucol[j]);
}

}  // namespace icp4d
