#include <atomic>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace rrmesh::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(RRMESH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar};
  return backend;
}

void check_sizes(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

}  // namespace

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

bool backend_available(Backend b) {
  static const bool avx2 = cpu_has_avx2();
  return b == Backend::Scalar || avx2;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument(std::string("kernel backend not available: ") + backend_name(b));
  current().store(b, std::memory_order_relaxed);
}

#if defined(RRMESH_HAVE_AVX2)
#define RRMESH_DISPATCH(fn, ...)                                               \
  (active_backend() == Backend::Avx2 ? detail::avx2::fn(__VA_ARGS__)           \
                                     : detail::scalar::fn(__VA_ARGS__))
#else
#define RRMESH_DISPATCH(fn, ...) detail::scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> a, std::span<const double> b) {
  check_sizes(a.size(), b.size(), "dot");
  return RRMESH_DISPATCH(dot, a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check_sizes(x.size(), y.size(), "axpy");
  RRMESH_DISPATCH(axpy, alpha, x.data(), y.data(), x.size());
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
  check_sizes(x.size(), y.size(), "xpby");
  RRMESH_DISPATCH(xpby, x.data(), beta, y.data(), x.size());
}

double norm_inf(std::span<const double> x) { return RRMESH_DISPATCH(norm_inf, x.data(), x.size()); }

void spmv(std::span<const int> row_ptr, std::span<const int> cols, std::span<const double> vals,
          std::span<const double> x, std::span<double> y) {
  if (row_ptr.empty()) return;
  const std::size_t rows = row_ptr.size() - 1;
  check_sizes(y.size(), rows, "spmv");
  check_sizes(cols.size(), vals.size(), "spmv");
  RRMESH_DISPATCH(spmv, row_ptr.data(), cols.data(), vals.data(), rows, x.data(), y.data());
}

void tri_radius_ratios(const TriangleBatch& batch, std::span<double> mu) {
  check_sizes(mu.size(), batch.n, "tri_radius_ratios");
  RRMESH_DISPATCH(tri_radius_ratios, batch, mu.data());
}

void tet_radius_ratios(const TetBatch& batch, std::span<double> mu) {
  check_sizes(mu.size(), batch.n, "tet_radius_ratios");
  RRMESH_DISPATCH(tet_radius_ratios, batch, mu.data());
}

}  // namespace rrmesh::kernels
