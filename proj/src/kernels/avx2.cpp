#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace rrmesh::kernels::detail {
namespace {

struct Lane {
  __m256d v;
  Lane() : v(_mm256_setzero_pd()) {}
  Lane(__m256d x) : v(x) {}  // NOLINT
  Lane(double x) : v(_mm256_set1_pd(x)) {}  // NOLINT
  friend Lane operator+(Lane a, Lane b) { return _mm256_add_pd(a.v, b.v); }
  friend Lane operator-(Lane a, Lane b) { return _mm256_sub_pd(a.v, b.v); }
  friend Lane operator*(Lane a, Lane b) { return _mm256_mul_pd(a.v, b.v); }
  friend Lane operator/(Lane a, Lane b) { return _mm256_div_pd(a.v, b.v); }
};

Lane sqrt_of(Lane a) { return _mm256_sqrt_pd(a.v); }
Lane max_of(Lane a, Lane b) { return _mm256_max_pd(a.v, b.v); }
Lane select_gt(Lane a, Lane b, Lane yes, Lane no) {
  return _mm256_blendv_pd(no.v, yes.v, _mm256_cmp_pd(a.v, b.v, _CMP_GT_OQ));
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

template <std::size_t N, class Batch, class Fn>
void batched(const Batch& b, double* mu, Fn fn) {
  std::size_t e = 0;
  for (; e + 4 <= b.n; e += 4) {
    Lane x[N] = {};
    for (std::size_t k = 0; k < N; ++k) x[k] = _mm256_loadu_pd(b.coords[k] + e);
    _mm256_storeu_pd(mu + e, fn(x).v);
  }
  if (e < b.n) {
    // Pad the tail with copies of the last element.
    alignas(32) double tmp[N][4];
    for (std::size_t k = 0; k < N; ++k)
      for (std::size_t l = 0; l < 4; ++l) tmp[k][l] = b.coords[k][std::min(e + l, b.n - 1)];
    Lane x[N] = {};
    for (std::size_t k = 0; k < N; ++k) x[k] = _mm256_load_pd(tmp[k]);
    alignas(32) double out[4];
    _mm256_store_pd(out, fn(x).v);
    for (std::size_t l = 0; e + l < b.n; ++l) mu[e + l] = out[l];
  }
}

}  // namespace

namespace avx2 {

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(a, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  const __m256d b = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_mul_pd(b, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] = x[i] + beta * y[i];
}

double norm_inf(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) r = std::max(r, std::abs(x[i]));
  return r;
}

void spmv(const int* row_ptr, const int* cols, const double* vals, std::size_t rows,
          const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    int k = row_ptr[r];
    const int end = row_ptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    for (; k + 4 <= end; k += 4) {
      const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
      const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < end; ++k) s += vals[k] * x[cols[k]];
    y[r] = s;
  }
}

void tri_radius_ratios(const TriangleBatch& b, double* mu) {
  batched<6>(b, mu, [](const Lane* x) { return triangle_mu(x); });
}

void tet_radius_ratios(const TetBatch& b, double* mu) {
  batched<12>(b, mu, [](const Lane* x) { return tet_mu(x); });
}

}  // namespace avx2
}  // namespace rrmesh::kernels::detail
