#pragma once

#include <cstddef>
#include <limits>

#include "rrmesh/geometry.hpp"
#include "rrmesh/kernels.hpp"

namespace rrmesh::kernels::detail {

// Radius-ratio formulas written once over a lane type L, so the scalar and
// AVX2 backends execute the same operation sequence. L provides + - * /,
// broadcast construction from double, and the free functions sqrt_of,
// max_of and select_gt(a, b, yes, no) = a > b ? yes : no.

template <class L>
L triangle_mu(const L* x) {
  const L ax = x[2] - x[0], ay = x[3] - x[1];
  const L bx = x[4] - x[0], by = x[5] - x[1];
  const L cx = x[4] - x[2], cy = x[5] - x[3];
  const L area = L(0.5) * (ax * by - ay * bx);
  const L l2sq = ax * ax + ay * ay;
  const L l1sq = bx * bx + by * by;
  const L l0sq = cx * cx + cy * cy;
  const L l0 = sqrt_of(l0sq), l1 = sqrt_of(l1sq), l2 = sqrt_of(l2sq);
  const L diam = max_of(max_of(l0, l1), l2);
  const L mu = (l0 + l1 + l2) * (l0 * l1 * l2) / (L(16.0) * area * area);
  return select_gt(area, L(kDegeneracyFactor) * diam * diam, mu,
                   L(std::numeric_limits<double>::infinity()));
}

template <class L>
struct L3 {
  L x, y, z;
};

template <class L>
L3<L> sub3(const L3<L>& a, const L3<L>& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}
template <class L>
L3<L> cross3(const L3<L>& a, const L3<L>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
template <class L>
L dot3(const L3<L>& a, const L3<L>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class L>
L tet_mu(const L* x) {
  const L3<L> p0{x[0], x[1], x[2]}, p1{x[3], x[4], x[5]}, p2{x[6], x[7], x[8]},
      p3{x[9], x[10], x[11]};
  const L3<L> v10 = sub3(p0, p1), v20 = sub3(p0, p2), v30 = sub3(p0, p3);
  const L3<L> e12 = sub3(p2, p1), e13 = sub3(p3, p1), e23 = sub3(p3, p2);
  const L n10 = dot3(v10, v10), n20 = dot3(v20, v20), n30 = dot3(v30, v30);
  const L n12 = dot3(e12, e12), n13 = dot3(e13, e13), n23 = dot3(e23, e23);
  const L diam = sqrt_of(max_of(max_of(max_of(n10, n20), max_of(n30, n12)), max_of(n13, n23)));

  const L3<L> c1020 = cross3(v10, v20), c2030 = cross3(v20, v30), c3010 = cross3(v30, v10);
  const L vol = dot3(v10, c2030) * L(-1.0 / 6.0);
  const L3<L> d0{n30 * c1020.x + n10 * c2030.x + n20 * c3010.x,
                 n30 * c1020.y + n10 * c2030.y + n20 * c3010.y,
                 n30 * c1020.z + n10 * c2030.z + n20 * c3010.z};
  const L3<L> f0 = cross3(e12, e13);
  const L s = L(0.5) * (sqrt_of(dot3(f0, f0)) + sqrt_of(dot3(c2030, c2030)) +
                        sqrt_of(dot3(c3010, c3010)) + sqrt_of(dot3(c1020, c1020)));
  const L mu = s * sqrt_of(dot3(d0, d0)) / (L(108.0) * vol * vol);
  return select_gt(vol, L(kDegeneracyFactor) * diam * diam * diam, mu,
                   L(std::numeric_limits<double>::infinity()));
}

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
double norm_inf(const double* x, std::size_t n);
void spmv(const int* row_ptr, const int* cols, const double* vals, std::size_t rows,
          const double* x, double* y);
void tri_radius_ratios(const TriangleBatch& b, double* mu);
void tet_radius_ratios(const TetBatch& b, double* mu);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void xpby(const double* x, double beta, double* y, std::size_t n);
double norm_inf(const double* x, std::size_t n);
void spmv(const int* row_ptr, const int* cols, const double* vals, std::size_t rows,
          const double* x, double* y);
void tri_radius_ratios(const TriangleBatch& b, double* mu);
void tet_radius_ratios(const TetBatch& b, double* mu);
}  // namespace avx2

}  // namespace rrmesh::kernels::detail
