#pragma once

// Data-parallel inner loops with a scalar reference implementation and an
// AVX2 variant chosen at runtime. Element-wise kernels and the batched
// radius-ratio kernels give bit-identical results on both backends;
// reductions (dot, spmv) agree to rounding.

#include <array>
#include <cstddef>
#include <span>

namespace rrmesh::kernels {

enum class Backend { Scalar, Avx2 };

const char* backend_name(Backend b);
bool backend_available(Backend b);
Backend active_backend();
/// Throws std::invalid_argument when the backend is not available.
void set_backend(Backend b);

/// Restores the previous backend on scope exit.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b) : previous_(active_backend()) { set_backend(b); }
  ~ScopedBackend() { set_backend(previous_); }
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

double dot(std::span<const double> a, std::span<const double> b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// y = x + beta * y
void xpby(std::span<const double> x, double beta, std::span<double> y);
double norm_inf(std::span<const double> x);

/// y = M x for a CSR matrix.
void spmv(std::span<const int> row_ptr, std::span<const int> cols, std::span<const double> vals,
          std::span<const double> x, std::span<double> y);

/// Structure-of-arrays element coordinates: coords[3*i + a] points at
/// coordinate a of local vertex i (2D uses 2*i + a) for n elements.
struct TriangleBatch {
  std::array<const double*, 6> coords{};
  std::size_t n = 0;
};
struct TetBatch {
  std::array<const double*, 12> coords{};
  std::size_t n = 0;
};

/// Radius ratio per element; +inf for elements at or below the degeneracy threshold.
void tri_radius_ratios(const TriangleBatch& batch, std::span<double> mu);
void tet_radius_ratios(const TetBatch& batch, std::span<double> mu);

}  // namespace rrmesh::kernels
