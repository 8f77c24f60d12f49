#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "icp4d/types.hpp"

namespace icp4d::kernels {

// Structure-of-arrays view over 3D points.
struct View {
  const double* x = nullptr;
  const double* y = nullptr;
  const double* z = nullptr;
  std::size_t n = 0;
};

struct Soa {
  std::vector<double> x, y, z;

  Soa() = default;
  explicit Soa(const std::vector<Point3>& pts) {
    x.reserve(pts.size());
    y.reserve(pts.size());
    z.reserve(pts.size());
    for (const Point3& p : pts) {
      x.push_back(p.x);
      y.push_back(p.y);
      z.push_back(p.z);
    }
  }
  View view() const { return {x.data(), y.data(), z.data(), x.size()}; }
  std::size_t size() const { return x.size(); }
};

// The data-parallel inner loops, in a scalar reference form and (when the CPU
// supports it) an AVX2 form selected at runtime. Both forms keep the same
// operation order for distance arithmetic so argmin ties resolve identically.
struct Backend {
  const char* name;

  // out[i*b.n + j] = ||a_i - b_j||^2
  void (*pairwise_sqdist)(View a, View b, double* out);

  // For each query point: index of the nearest target (lowest index on ties)
  // and the squared distance. t.n >= 1.
  void (*nn)(View q, View t, int32_t* idx, double* d2);

  // out[i] = log sum_j exp(col_add[j] - m[i*cols + j])
  void (*lse_rows)(const double* m, std::size_t rows, std::size_t cols, const double* col_add,
                   double* out);

  // out[j] = log sum_i exp(row_add[i] - m[i*cols + j])
  void (*lse_cols)(const double* m, std::size_t rows, std::size_t cols, const double* row_add,
                   double* out);

  // out[i*cols + j] = exp(row_add[i] + col_add[j] - m[i*cols + j])
  void (*plan_exp)(const double* m, std::size_t rows, std::size_t cols, const double* row_add,
                   const double* col_add, double* out);

  // Per row: max_j (col_add[j] - m[i*cols + j]) and its argmax (lowest index
  // on ties).
  void (*row_max_arg)(const double* m, std::size_t rows, std::size_t cols, const double* col_add,
                      double* maxval, int32_t* argmax);

  // out[i] = exp(in[i])
  void (*expv)(const double* in, double* out, std::size_t n);
};

const Backend& scalar();
const Backend* avx2();    // nullptr when unsupported by the CPU or the build
const Backend& active();  // avx2 when available unless ICP4D_FORCE_SCALAR=1

}  // namespace icp4d::kernels
