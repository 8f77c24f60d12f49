#pragma once

#include "icp4d/types.hpp"

namespace icp4d {

// Eigendecomposition of a symmetric 3x3 by cyclic Jacobi rotations:
// a = v * diag(w) * v^T, eigenvalues descending, v orthonormal.
void eig_sym3(const Mat3& a, Mat3& v, Vec3& w);

// Singular value decomposition a = u * diag(s) * v^T with s descending >= 0
// and u, v orthonormal (determinants may be -1; callers needing a proper
// rotation apply their own sign fix).
void svd3(const Mat3& a, Mat3& u, Vec3& s, Mat3& v);

}  // namespace icp4d
