#include <cmath>
#include <limits>

#include "icp4d/kernels.hpp"

// Reference implementations. Distance arithmetic is written as mul-then-add in
// a fixed order and this translation unit is compiled with contraction off, so
// vector backends can reproduce results bit-for-bit.

namespace icp4d::kernels {
namespace {

void pairwise_sqdist_scalar(View a, View b, double* out) {
  for (std::size_t i = 0; i < a.n; ++i) {
    const double ax = a.x[i], ay = a.y[i], az = a.z[i];
    double* row = out + i * b.n;
    for (std::size_t j = 0; j < b.n; ++j) {
      const double dx = ax - b.x[j];
      const double dy = ay - b.y[j];
      const double dz = az - b.z[j];
      double s = dx * dx;
      s += dy * dy;
      s += dz * dz;
      row[j] = s;
    }
  }
}

void nn_scalar(View q, View t, int32_t* idx, double* d2) {
  for (std::size_t i = 0; i < q.n; ++i) {
    const double qx = q.x[i], qy = q.y[i], qz = q.z[i];
    double best = std::numeric_limits<double>::infinity();
    int32_t best_j = 0;
    for (std::size_t j = 0; j < t.n; ++j) {
      const double dx = qx - t.x[j];
      const double dy = qy - t.y[j];
      const double dz = qz - t.z[j];
      double s = dx * dx;
      s += dy * dy;
      s += dz * dz;
      if (s < best) {
        best = s;
        best_j = static_cast<int32_t>(j);
      }
    }
    idx[i] = best_j;
    d2[i] = best;
  }
}

void lse_rows_scalar(const double* m, std::size_t rows, std::size_t cols, const double* col_add,
                     double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols; ++j) mx = std::max(mx, col_add[j] - row[j]);
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += std::exp(col_add[j] - row[j] - mx);
    out[i] = mx + std::log(s);
  }
}

void lse_cols_scalar(const double* m, std::size_t rows, std::size_t cols, const double* row_add,
                     double* out) {
  // streamed row-major: column-wise running max, then column-wise exp sums
  std::vector<double> mx(cols, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    const double add = row_add[i];
    for (std::size_t j = 0; j < cols; ++j) mx[j] = std::max(mx[j], add - row[j]);
  }
  std::vector<double> sum(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    const double add = row_add[i];
    for (std::size_t j = 0; j < cols; ++j) sum[j] += std::exp(add - row[j] - mx[j]);
  }
  for (std::size_t j = 0; j < cols; ++j) out[j] = mx[j] + std::log(sum[j]);
}

void plan_exp_scalar(const double* m, std::size_t rows, std::size_t cols, const double* row_add,
                     const double* col_add, double* out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    double* orow = out + i * cols;
    const double add = row_add[i];
    for (std::size_t j = 0; j < cols; ++j) orow[j] = std::exp(add + col_add[j] - row[j]);
  }
}

void row_max_arg_scalar(const double* m, std::size_t rows, std::size_t cols, const double* col_add,
                        double* maxval, int32_t* argmax) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    double best = -std::numeric_limits<double>::infinity();
    int32_t best_j = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = col_add[j] - row[j];
      if (v > best) {
        best = v;
        best_j = static_cast<int32_t>(j);
      }
    }
    maxval[i] = best;
    argmax[i] = best_j;
  }
}

void expv_scalar(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(in[i]);
}

}  // namespace

const Backend& scalar() {
  static const Backend backend = {
      "scalar",        pairwise_sqdist_scalar, nn_scalar,   lse_rows_scalar,
      lse_cols_scalar, plan_exp_scalar,        row_max_arg_scalar, expv_scalar,
  };
  return backend;
}

}  // namespace icp4d::kernels
