#include "rrmesh/step_bound.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rrmesh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Edge vectors from local vertex 0, for the position and the direction.
struct CellMotion {
  int dim;
  std::array<Vec3, 3> e{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 3> f{Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};

  // Signed measure scaled by d! (twice the area, six times the volume).
  double measure(double t) const {
    if (dim == 2) {
      const Vec3 a = e[0] + t * f[0], b = e[1] + t * f[1];
      return a.x() * b.y() - a.y() * b.x();
    }
    return (e[0] + t * f[0]).dot((e[1] + t * f[1]).cross(e[2] + t * f[2]));
  }

  // Polynomial coefficients of measure(t), lowest degree first.
  std::array<double, 4> coefficients() const {
    const auto cr = [](const Vec3& a, const Vec3& b) { return a.x() * b.y() - a.y() * b.x(); };
    const auto det = [](const Vec3& a, const Vec3& b, const Vec3& c) { return a.dot(b.cross(c)); };
    if (dim == 2) {
      return {cr(e[0], e[1]), cr(f[0], e[1]) + cr(e[0], f[1]), cr(f[0], f[1]), 0.0};
    }
    return {det(e[0], e[1], e[2]),
            det(f[0], e[1], e[2]) + det(e[0], f[1], e[2]) + det(e[0], e[1], f[2]),
            det(f[0], f[1], e[2]) + det(f[0], e[1], f[2]) + det(e[0], f[1], f[2]),
            det(f[0], f[1], f[2])};
  }
};

// Positive roots of c0 + c1 t + c2 t^2, ascending.
std::array<double, 2> quadratic_roots(double c0, double c1, double c2, int& count) {
  count = 0;
  std::array<double, 2> r{kInf, kInf};
  if (c2 == 0.0) {
    if (c1 != 0.0) r[count++] = -c0 / c1;
  } else {
    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc >= 0.0) {
      const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
      r[count++] = q / c2;
      if (q != 0.0) r[count++] = c0 / q;
    }
  }
  int kept = 0;
  for (int i = 0; i < count; ++i)
    if (r[i] > 0.0 && std::isfinite(r[i])) r[kept++] = r[i];
  count = kept;
  if (count == 2 && r[0] > r[1]) std::swap(r[0], r[1]);
  return r;
}

// Bracket [lo, hi] with measure(lo) > 0 >= measure(hi); returns lo.
double bisect(const CellMotion& m, double lo, double hi) {
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (m.measure(mid) > 0.0 ? lo : hi) = mid;
  }
  return lo;
}

// First parameter in (0, limit] where the measure stops being positive,
// reported as the last certified-positive parameter; `limit` when none.
double first_crossing(const CellMotion& m, double limit) {
  const auto c = m.coefficients();
  int n = 0;
  const auto crit = m.dim == 2
                        ? quadratic_roots(c[1], 2.0 * c[2], 0.0, n)
                        : quadratic_roots(c[1], 2.0 * c[2], 3.0 * c[3], n);
  double a = 0.0;
  for (int i = 0; i <= n; ++i) {
    double b = i < n ? std::min(crit[i], limit) : limit;
    if (b <= a) continue;
    if (std::isinf(b)) {
      // Unbounded tail: grow until the measure fails or the scale runs out.
      double probe = a > 0.0 ? 2.0 * a : 1.0;
      bool found = false;
      for (int it = 0; it < 2100; ++it, probe *= 2.0) {
        if (!std::isfinite(probe)) break;
        if (m.measure(probe) <= 0.0) {
          found = true;
          break;
        }
        a = probe;
      }
      return found ? bisect(m, a, probe) : kInf;
    }
    if (m.measure(b) <= 0.0) return bisect(m, a, b);
    a = b;
    if (b >= limit) break;
  }
  return limit;
}

}  // namespace

double max_safe_step(int dim, std::span<const int> cells, std::size_t nv,
                     std::span<const double> coords, std::span<const double> direction) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("max_safe_step: dim must be 2 or 3");
  if (coords.size() != nv * dim || direction.size() != nv * dim)
    throw std::invalid_argument("max_safe_step: vector length mismatch");
  const int k = dim + 1;
  const std::size_t nc = cells.size() / k;
  double bound = kInf;
  for (std::size_t cidx = 0; cidx < nc; ++cidx) {
    const int* cell = cells.data() + cidx * k;
    CellMotion m{dim};
    bool moving = false;
    for (int i = 1; i < k; ++i) {
      for (int a = 0; a < dim; ++a) {
        m.e[i - 1][a] = coords[a * nv + cell[i]] - coords[a * nv + cell[0]];
        m.f[i - 1][a] = direction[a * nv + cell[i]] - direction[a * nv + cell[0]];
        moving = moving || m.f[i - 1][a] != 0.0;
      }
    }
    if (!moving) continue;
    if (m.measure(0.0) <= 0.0) return 0.0;
    bound = std::min(bound, first_crossing(m, bound));
  }
  return bound;
}

double max_safe_step(const SimplexMesh& mesh, std::span<const double> direction) {
  return max_safe_step(mesh.dim(), mesh.cells(), mesh.num_vertices(), coordinate_vector(mesh),
                       direction);
}

}  // namespace rrmesh
