#include "icp4d/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <limits>
#include <vector>

namespace icp4d::kernels {
namespace {

// Vectorized double-precision exp, Cephes-style rational approximation:
// exp(x) = E(r) * 2^n with n = round(x/ln2), |r| <= ln2/2. Inputs below -708
// flush to zero; inputs are clamped at +709 (callers never exceed it).
inline __m256d exp4(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d hi = _mm256_set1_pd(709.0);

  const __m256d orig = x;
  x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);  // keeps n within [-1022, 1023]

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(n, c1, x);
  x = _mm256_fnmadd_pd(n, c2, x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(p0, xx, p1);
  px = _mm256_fmadd_pd(px, xx, p2);
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(q0, xx, q1);
  qx = _mm256_fmadd_pd(qx, xx, q2);
  qx = _mm256_fmadd_pd(qx, xx, q3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

  // 2^n assembled in the exponent field (n + 1023 is always in [1, 2046])
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
  __m256i bits = _mm256_castpd_si256(_mm256_add_pd(_mm256_add_pd(n, _mm256_set1_pd(1023.0)), magic));
  bits = _mm256_and_si256(bits, _mm256_set1_epi64x(0x7FF));
  const __m256d pow2n = _mm256_castsi256_pd(_mm256_slli_epi64(bits, 52));

  const __m256d res = _mm256_mul_pd(e, pow2n);
  const __m256d underflow = _mm256_cmp_pd(orig, lo, _CMP_LT_OQ);
  return _mm256_andnot_pd(underflow, res);
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double m = lanes[0];
  for (int k = 1; k < 4; ++k) m = lanes[k] > m ? lanes[k] : m;
  return m;
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

// Distance arithmetic deliberately uses mul-then-add (no FMA) so results are
// bit-identical with the scalar backend and ties resolve to the same index.
inline __m256d sqdist4(__m256d ax, __m256d ay, __m256d az, const double* bx, const double* by,
                       const double* bz, std::size_t j) {
  const __m256d dx = _mm256_sub_pd(ax, _mm256_loadu_pd(bx + j));
  const __m256d dy = _mm256_sub_pd(ay, _mm256_loadu_pd(by + j));
  const __m256d dz = _mm256_sub_pd(az, _mm256_loadu_pd(bz + j));
  __m256d s = _mm256_mul_pd(dx, dx);
  s = _mm256_add_pd(s, _mm256_mul_pd(dy, dy));
  s = _mm256_add_pd(s, _mm256_mul_pd(dz, dz));
  return s;
}

inline double sqdist1(double ax, double ay, double az, double bx, double by, double bz) {
  const double dx = ax - bx;
  const double dy = ay - by;
  const double dz = az - bz;
  double s = dx * dx;
  s += dy * dy;
  s += dz * dz;
  return s;
}

void pairwise_sqdist_avx2(View a, View b, double* out) {
  const std::size_t jv = b.n & ~std::size_t{3};
  for (std::size_t i = 0; i < a.n; ++i) {
    const __m256d ax = _mm256_set1_pd(a.x[i]);
    const __m256d ay = _mm256_set1_pd(a.y[i]);
    const __m256d az = _mm256_set1_pd(a.z[i]);
    double* row = out + i * b.n;
    std::size_t j = 0;
    for (; j < jv; j += 4) _mm256_storeu_pd(row + j, sqdist4(ax, ay, az, b.x, b.y, b.z, j));
    for (; j < b.n; ++j) row[j] = sqdist1(a.x[i], a.y[i], a.z[i], b.x[j], b.y[j], b.z[j]);
  }
}

void nn_avx2(View q, View t, int32_t* idx, double* d2) {
  const std::size_t jv = t.n & ~std::size_t{3};
  for (std::size_t i = 0; i < q.n; ++i) {
    const __m256d ax = _mm256_set1_pd(q.x[i]);
    const __m256d ay = _mm256_set1_pd(q.y[i]);
    const __m256d az = _mm256_set1_pd(q.z[i]);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256i best_j = _mm256_setzero_si256();
    __m256i cur_j = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256i four = _mm256_set1_epi64x(4);
    for (std::size_t j = 0; j < jv; j += 4) {
      const __m256d s = sqdist4(ax, ay, az, t.x, t.y, t.z, j);
      const __m256d lt = _mm256_cmp_pd(s, best, _CMP_LT_OQ);
      best = _mm256_blendv_pd(best, s, lt);
      best_j = _mm256_blendv_epi8(best_j, cur_j, _mm256_castpd_si256(lt));
      cur_j = _mm256_add_epi64(cur_j, four);
    }
    alignas(32) double vals[4];
    alignas(32) int64_t inds[4];
    _mm256_store_pd(vals, best);
    _mm256_store_si256(reinterpret_cast<__m256i*>(inds), best_j);
    double bv = std::numeric_limits<double>::infinity();
    int64_t bj = 0;
    for (int k = 0; k < 4; ++k) {
      if (vals[k] < bv || (vals[k] == bv && inds[k] < bj)) {
        bv = vals[k];
        bj = inds[k];
      }
    }
    for (std::size_t j = jv; j < t.n; ++j) {
      const double s = sqdist1(q.x[i], q.y[i], q.z[i], t.x[j], t.y[j], t.z[j]);
      if (s < bv) {
        bv = s;
        bj = static_cast<int64_t>(j);
      }
    }
    idx[i] = static_cast<int32_t>(bj);
    d2[i] = bv;
  }
}

void lse_rows_avx2(const double* m, std::size_t rows, std::size_t cols, const double* col_add,
                   double* out) {
  const std::size_t jv = cols & ~std::size_t{3};
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    __m256d vmx = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    std::size_t j = 0;
    for (; j < jv; j += 4)
      vmx = _mm256_max_pd(vmx, _mm256_sub_pd(_mm256_loadu_pd(col_add + j), _mm256_loadu_pd(row + j)));
    double mx = jv > 0 ? hmax(vmx) : -std::numeric_limits<double>::infinity();
    for (; j < cols; ++j) mx = std::max(mx, col_add[j] - row[j]);

    const __m256d vm = _mm256_set1_pd(mx);
    __m256d vs = _mm256_setzero_pd();
    j = 0;
    for (; j < jv; j += 4) {
      const __m256d arg =
          _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(col_add + j), _mm256_loadu_pd(row + j)), vm);
      vs = _mm256_add_pd(vs, exp4(arg));
    }
    double s = hsum(vs);
    for (; j < cols; ++j) s += std::exp(col_add[j] - row[j] - mx);
    out[i] = mx + std::log(s);
  }
}

void lse_cols_avx2(const double* m, std::size_t rows, std::size_t cols, const double* row_add,
                   double* out) {
  const std::size_t jv = cols & ~std::size_t{3};
  std::vector<double> mx(cols, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    const __m256d add = _mm256_set1_pd(row_add[i]);
    std::size_t j = 0;
    for (; j < jv; j += 4) {
      const __m256d v = _mm256_sub_pd(add, _mm256_loadu_pd(row + j));
      _mm256_storeu_pd(mx.data() + j, _mm256_max_pd(_mm256_loadu_pd(mx.data() + j), v));
    }
    for (; j < cols; ++j) mx[j] = std::max(mx[j], row_add[i] - row[j]);
  }
  std::vector<double> sum(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    const __m256d add = _mm256_set1_pd(row_add[i]);
    std::size_t j = 0;
    for (; j < jv; j += 4) {
      const __m256d arg =
          _mm256_sub_pd(_mm256_sub_pd(add, _mm256_loadu_pd(row + j)), _mm256_loadu_pd(mx.data() + j));
      _mm256_storeu_pd(sum.data() + j, _mm256_add_pd(_mm256_loadu_pd(sum.data() + j), exp4(arg)));
    }
    for (; j < cols; ++j) sum[j] += std::exp(row_add[i] - row[j] - mx[j]);
  }
  for (std::size_t j = 0; j < cols; ++j) out[j] = mx[j] + std::log(sum[j]);
}

void plan_exp_avx2(const double* m, std::size_t rows, std::size_t cols, const double* row_add,
                   const double* col_add, double* out) {
  const std::size_t jv = cols & ~std::size_t{3};
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    double* orow = out + i * cols;
    const __m256d add = _mm256_set1_pd(row_add[i]);
    std::size_t j = 0;
    for (; j < jv; j += 4) {
      const __m256d arg =
          _mm256_sub_pd(_mm256_add_pd(add, _mm256_loadu_pd(col_add + j)), _mm256_loadu_pd(row + j));
      _mm256_storeu_pd(orow + j, exp4(arg));
    }
    for (; j < cols; ++j) orow[j] = std::exp(row_add[i] + col_add[j] - row[j]);
  }
}

void row_max_arg_avx2(const double* m, std::size_t rows, std::size_t cols, const double* col_add,
                      double* maxval, int32_t* argmax) {
  const std::size_t jv = cols & ~std::size_t{3};
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    __m256d best = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    __m256i best_j = _mm256_setzero_si256();
    __m256i cur_j = _mm256_setr_epi64x(0, 1, 2, 3);
    const __m256i four = _mm256_set1_epi64x(4);
    for (std::size_t j = 0; j < jv; j += 4) {
      const __m256d v = _mm256_sub_pd(_mm256_loadu_pd(col_add + j), _mm256_loadu_pd(row + j));
      const __m256d gt = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
      best = _mm256_blendv_pd(best, v, gt);
      best_j = _mm256_blendv_epi8(best_j, cur_j, _mm256_castpd_si256(gt));
      cur_j = _mm256_add_epi64(cur_j, four);
    }
    alignas(32) double vals[4];
    alignas(32) int64_t inds[4];
    _mm256_store_pd(vals, best);
    _mm256_store_si256(reinterpret_cast<__m256i*>(inds), best_j);
    double bv = -std::numeric_limits<double>::infinity();
    int64_t bj = 0;
    for (int k = 0; k < 4; ++k) {
      if (vals[k] > bv || (vals[k] == bv && inds[k] < bj)) {
        bv = vals[k];
        bj = inds[k];
      }
    }
    for (std::size_t j = jv; j < cols; ++j) {
      const double v = col_add[j] - row[j];
      if (v > bv) {
        bv = v;
        bj = static_cast<int64_t>(j);
      }
    }
    maxval[i] = bv;
    argmax[i] = static_cast<int32_t>(bj);
  }
}

void expv_avx2(const double* in, double* out, std::size_t n) {
  const std::size_t nv = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < nv; i += 4) _mm256_storeu_pd(out + i, exp4(_mm256_loadu_pd(in + i)));
  for (; i < n; ++i) out[i] = std::exp(in[i]);
}

}  // namespace

namespace detail {
const Backend* avx2_backend_impl() {
  static const Backend backend = {
      "avx2",        pairwise_sqdist_avx2, nn_avx2,          lse_rows_avx2,
      lse_cols_avx2, plan_exp_avx2,        row_max_arg_avx2, expv_avx2,
  };
  return &backend;
}
}  // namespace detail

}  // namespace icp4d::kernels

#else

namespace icp4d::kernels::detail {
const Backend* avx2_backend_impl() { return nullptr; }
}  // namespace icp4d::kernels::detail

#endif
