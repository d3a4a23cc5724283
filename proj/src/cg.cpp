#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrmesh/error.hpp"
#include "rrmesh/kernels.hpp"
#include "rrmesh/solvers.hpp"

namespace rrmesh {

CgResult cg_solve(const CsrMatrix& p, std::span<const double> b, std::span<double> x, double tol,
                  int max_iters) {
  const std::size_t n = p.rows();
  if (b.size() != n || x.size() != n || p.cols() != n)
    throw std::invalid_argument("cg_solve: dimension mismatch");
  if (max_iters <= 0) max_iters = static_cast<int>(std::max<std::size_t>(n, 1));

  CgResult res;
  const double b_norm = std::sqrt(kernels::dot(b, b));
  if (b_norm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }

  // Jacobi scaling.
  std::vector<double> inv_diag(n);
  const auto rp = p.row_ptr();
  const auto ci = p.col_idx();
  const auto va = p.values();
  for (std::size_t i = 0; i < n; ++i) {
    double dii = 0.0;
    for (int k = rp[i]; k < rp[i + 1]; ++k)
      if (static_cast<std::size_t>(ci[k]) == i) dii += va[k];
    if (!(dii > 0.0))
      throw IndefiniteMatrix("non-positive diagonal entry " + std::to_string(dii) + " in row " + std::to_string(i));
    inv_diag[i] = 1.0 / dii;
  }

  std::vector<double> r(n), z(n), d(n), q(n);
  p.multiply(x, q);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = b[i] - q[i];
    z[i] = inv_diag[i] * r[i];
  }
  d = z;
  double rz = kernels::dot(r, z);
  res.relative_residual = std::sqrt(kernels::dot(r, r)) / b_norm;
  while (res.relative_residual > tol && res.iterations < max_iters) {
    p.multiply(d, q);
    const double curvature = kernels::dot(d, q);
    if (!(curvature > 0.0)) {
      throw IndefiniteMatrix("conjugate gradients met non-positive curvature " +
                             std::to_string(curvature) + " at iteration " +
                             std::to_string(res.iterations));
    }
    const double alpha = rz / curvature;
    kernels::axpy(alpha, d, x);
    kernels::axpy(-alpha, q, r);
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = kernels::dot(r, z);
    kernels::xpby(z, rz_new / rz, d);
    rz = rz_new;
    ++res.iterations;
    res.relative_residual = std::sqrt(kernels::dot(r, r)) / b_norm;
  }
  // Report the true residual rather than the recursively updated one.
  p.multiply(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  res.relative_residual = std::sqrt(kernels::dot(r, r)) / b_norm;
  res.converged = res.relative_residual <= tol;
  return res;
}

}  // namespace rrmesh
