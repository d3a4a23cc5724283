#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace rrmesh::kernels::detail {
namespace {

struct Lane {
  double v;
  Lane(double x) : v(x) {}  // NOLINT: implicit broadcast keeps the shared formulas readable
  friend Lane operator+(Lane a, Lane b) { return a.v + b.v; }
  friend Lane operator-(Lane a, Lane b) { return a.v - b.v; }
  friend Lane operator*(Lane a, Lane b) { return a.v * b.v; }
  friend Lane operator/(Lane a, Lane b) { return a.v / b.v; }
};

Lane sqrt_of(Lane a) { return std::sqrt(a.v); }
// Same operand order as _mm256_max_pd: returns b unless a > b.
Lane max_of(Lane a, Lane b) { return a.v > b.v ? a.v : b.v; }
Lane select_gt(Lane a, Lane b, Lane yes, Lane no) { return a.v > b.v ? yes : no; }

}  // namespace

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void xpby(const double* x, double beta, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + beta * y[i];
}

double norm_inf(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

void spmv(const int* row_ptr, const int* cols, const double* vals, std::size_t rows,
          const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
    y[r] = s;
  }
}

void tri_radius_ratios(const TriangleBatch& b, double* mu) {
  for (std::size_t e = 0; e < b.n; ++e) {
    Lane x[6] = {b.coords[0][e], b.coords[1][e], b.coords[2][e],
                 b.coords[3][e], b.coords[4][e], b.coords[5][e]};
    mu[e] = triangle_mu(x).v;
  }
}

void tet_radius_ratios(const TetBatch& b, double* mu) {
  for (std::size_t e = 0; e < b.n; ++e) {
    Lane x[12] = {b.coords[0][e], b.coords[1][e], b.coords[2][e],  b.coords[3][e],
                  b.coords[4][e], b.coords[5][e], b.coords[6][e],  b.coords[7][e],
                  b.coords[8][e], b.coords[9][e], b.coords[10][e], b.coords[11][e]};
    mu[e] = tet_mu(x).v;
  }
}

}  // namespace scalar
}  // namespace rrmesh::kernels::detail
