#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rrmesh/kernels.hpp"
#include "support.hpp"

using namespace rrmesh;
using kernels::Backend;
using test_support::Rng;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<Backend> backends() {
  std::vector<Backend> out{Backend::Scalar};
  if (kernels::backend_available(Backend::Avx2)) out.push_back(Backend::Avx2);
  return out;
}

const std::size_t kLengths[] = {0, 1, 3, 4, 5, 7, 8, 17, 64, 1001};

struct RandomCsr {
  std::vector<int> row_ptr{0}, cols;
  std::vector<double> vals;
};

RandomCsr random_csr(Rng& rng, std::size_t rows, std::size_t ncols) {
  RandomCsr m;
  for (std::size_t r = 0; r < rows; ++r) {
    const int k = static_cast<int>(rng.next() % 9);
    for (int i = 0; i < k; ++i) {
      m.cols.push_back(static_cast<int>(rng.next() % ncols));
      m.vals.push_back(rng.uniform(-1.0, 1.0));
    }
    m.row_ptr.push_back(static_cast<int>(m.cols.size()));
  }
  return m;
}

// Point coordinates as SoA arrays for a batch of elements.
struct Soa {
  std::vector<std::vector<double>> coords;
  template <class Batch>
  Batch batch(std::size_t n) const {
    Batch b;
    for (std::size_t k = 0; k < coords.size(); ++k) b.coords[k] = coords[k].data();
    b.n = n;
    return b;
  }
};

Soa triangles_soa(const std::vector<Triangle>& tris) {
  Soa s;
  s.coords.assign(6, {});
  for (const auto& t : tris)
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 2; ++a) s.coords[2 * i + a].push_back(t.v[i][a]);
  return s;
}

Soa tets_soa(const std::vector<Tetrahedron>& tets) {
  Soa s;
  s.coords.assign(12, {});
  for (const auto& t : tets)
    for (int i = 0; i < 4; ++i)
      for (int a = 0; a < 3; ++a) s.coords[3 * i + a].push_back(t.v[i][a]);
  return s;
}

}  // namespace

TEST_CASE("backend selection") {
  CHECK(kernels::backend_available(Backend::Scalar));
  const Backend before = kernels::active_backend();
  {
    kernels::ScopedBackend scoped(Backend::Scalar);
    CHECK(kernels::active_backend() == Backend::Scalar);
  }
  CHECK(kernels::active_backend() == before);
  if (!kernels::backend_available(Backend::Avx2))
    CHECK_THROWS_AS(kernels::set_backend(Backend::Avx2), std::invalid_argument);
  CHECK(std::string(kernels::backend_name(Backend::Avx2)) == "avx2");
  MESSAGE("active backend: " << std::string(kernels::backend_name(before)));
}

TEST_CASE("vector kernels match plain loops") {
  Rng rng(3);
  for (Backend b : backends()) {
    kernels::ScopedBackend scoped(b);
    CAPTURE(kernels::backend_name(b));
    for (std::size_t n : kLengths) {
      const auto x = random_vector(rng, n), y0 = random_vector(rng, n);
      long double ref = 0.0L, scale = 0.0L;
      double inf = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        ref += static_cast<long double>(x[i]) * y0[i];
        scale += std::abs(static_cast<long double>(x[i]) * y0[i]);
        inf = std::max(inf, std::abs(x[i]));
      }
      CHECK(std::abs(kernels::dot(x, y0) - static_cast<double>(ref)) <= 1e-15 * static_cast<double>(scale) + 1e-300);
      CHECK(kernels::norm_inf(x) == inf);

      auto y = y0;
      kernels::axpy(0.75, x, y);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == y0[i] + 0.75 * x[i]);
      y = y0;
      kernels::xpby(x, -1.25, y);
      for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == x[i] + -1.25 * y0[i]);
    }
    std::vector<double> a(3), c(4);
    CHECK_THROWS_AS(kernels::dot(a, c), std::invalid_argument);
    CHECK_THROWS_AS(kernels::axpy(1.0, a, c), std::invalid_argument);
  }
}

TEST_CASE("backends agree on vector kernels") {
  if (!kernels::backend_available(Backend::Avx2)) return;
  Rng rng(4);
  for (std::size_t n : kLengths) {
    const auto x = random_vector(rng, n), y0 = random_vector(rng, n);
    double d[2], inf[2];
    std::vector<double> ax[2], xp[2];
    for (int k = 0; k < 2; ++k) {
      kernels::ScopedBackend scoped(k ? Backend::Avx2 : Backend::Scalar);
      d[k] = kernels::dot(x, y0);
      inf[k] = kernels::norm_inf(x);
      ax[k] = y0;
      kernels::axpy(-0.3, x, ax[k]);
      xp[k] = y0;
      kernels::xpby(x, 0.9, xp[k]);
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i] * y0[i]);
    CHECK(std::abs(d[0] - d[1]) <= 4 * std::numeric_limits<double>::epsilon() * scale);
    CHECK(inf[0] == inf[1]);
    CHECK(same_bits(ax[0], ax[1]));
    CHECK(same_bits(xp[0], xp[1]));
  }
}

TEST_CASE("sparse matrix-vector product") {
  Rng rng(5);
  for (std::size_t rows : {0u, 1u, 5u, 33u, 400u}) {
    const std::size_t ncols = 50;
    const auto m = random_csr(rng, rows, ncols);
    const auto x = random_vector(rng, ncols);
    std::vector<double> ref(rows, 0.0), scale(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
      for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
        ref[r] += m.vals[k] * x[m.cols[k]];
        scale[r] += std::abs(m.vals[k] * x[m.cols[k]]);
      }
    std::vector<double> y[2];
    const auto bs = backends();
    for (std::size_t k = 0; k < bs.size(); ++k) {
      kernels::ScopedBackend scoped(bs[k]);
      y[k].assign(rows, 7.0);
      kernels::spmv(m.row_ptr, m.cols, m.vals, x, y[k]);
      for (std::size_t r = 0; r < rows; ++r) CHECK(std::abs(y[k][r] - ref[r]) <= 1e-15 * scale[r] + 1e-300);
    }
    if (bs.size() == 2)
      for (std::size_t r = 0; r < rows; ++r)
        CHECK(std::abs(y[0][r] - y[1][r]) <= 4 * std::numeric_limits<double>::epsilon() * scale[r]);
  }
}

TEST_CASE("batched triangle radius ratios") {
  Rng rng(6);
  std::vector<Triangle> tris;
  for (int k = 0; k < 203; ++k) tris.push_back(test_support::random_triangle(rng, 1e6));
  Triangle flat{{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)}};
  Triangle inverted{{Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)}};
  tris.insert(tris.begin() + 5, flat);
  tris.insert(tris.begin() + 9, inverted);
  const Soa soa = triangles_soa(tris);
  std::vector<double> mu[2];
  const auto bs = backends();
  for (std::size_t k = 0; k < bs.size(); ++k) {
    kernels::ScopedBackend scoped(bs[k]);
    mu[k].assign(tris.size(), 0.0);
    kernels::tri_radius_ratios(soa.batch<kernels::TriangleBatch>(tris.size()), mu[k]);
    for (std::size_t i = 0; i < tris.size(); ++i) {
      if (i == 5 || i == 9) {
        CHECK(std::isinf(mu[k][i]));
      } else {
        CHECK(mu[k][i] == doctest::Approx(test_support::oracle_triangle_mu(tris[i])).epsilon(1e-10));
      }
    }
    // Every tail length of a 4-wide batch.
    for (std::size_t n = 0; n < 9; ++n) {
      std::vector<double> part(n);
      kernels::tri_radius_ratios(soa.batch<kernels::TriangleBatch>(n), part);
      for (std::size_t i = 0; i < n; ++i) CHECK((part[i] == mu[k][i] || (std::isinf(part[i]) && std::isinf(mu[k][i]))));
    }
  }
  if (bs.size() == 2) CHECK(same_bits(mu[0], mu[1]));
}

TEST_CASE("batched tetrahedron radius ratios") {
  Rng rng(7);
  std::vector<Tetrahedron> tets;
  for (int k = 0; k < 201; ++k) tets.push_back(test_support::random_tet(rng, 1e6));
  Tetrahedron flat{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(1, 1, 0)}};
  Tetrahedron inverted{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0)}};
  tets.insert(tets.begin() + 2, flat);
  tets.insert(tets.begin() + 7, inverted);
  const Soa soa = tets_soa(tets);
  std::vector<double> mu[2];
  const auto bs = backends();
  for (std::size_t k = 0; k < bs.size(); ++k) {
    kernels::ScopedBackend scoped(bs[k]);
    mu[k].assign(tets.size(), 0.0);
    kernels::tet_radius_ratios(soa.batch<kernels::TetBatch>(tets.size()), mu[k]);
    for (std::size_t i = 0; i < tets.size(); ++i) {
      if (i == 2 || i == 7) {
        CHECK(std::isinf(mu[k][i]));
      } else {
        CHECK(mu[k][i] == doctest::Approx(test_support::oracle_tet_mu(tets[i])).epsilon(1e-9));
      }
    }
  }
  if (bs.size() == 2) CHECK(same_bits(mu[0], mu[1]));
}
