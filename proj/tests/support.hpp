#pragma once

// Shared test helpers: deterministic random elements and independent oracles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "rrmesh/geometry.hpp"

namespace test_support {

using rrmesh::Tetrahedron;
using rrmesh::Triangle;
using rrmesh::Vec2;
using rrmesh::Vec3;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// Circumradius of a triangle from side lengths; inradius from area / semi-perimeter.
inline double oracle_triangle_mu(const Triangle& t) {
  const double a = (t.v[1] - t.v[2]).norm();
  const double b = (t.v[2] - t.v[0]).norm();
  const double c = (t.v[0] - t.v[1]).norm();
  const Vec2 e1 = t.v[1] - t.v[0];
  const Vec2 e2 = t.v[2] - t.v[0];
  const double area = 0.5 * std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  const double big_r = a * b * c / (4.0 * area);
  const double small_r = 2.0 * area / (a + b + c);
  return big_r / (2.0 * small_r);
}

struct TetOracle {
  double volume, area_sum, circumradius, inradius;
};

// Circumcenter from the 3x3 linear system 2(x_i - x_0).c = |x_i|^2 - |x_0|^2.
inline TetOracle oracle_tet(const Tetrahedron& t) {
  Eigen::Matrix3d m;
  Eigen::Vector3d rhs;
  for (int i = 1; i < 4; ++i) {
    m.row(i - 1) = 2.0 * (t.v[i] - t.v[0]).transpose();
    rhs(i - 1) = t.v[i].squaredNorm() - t.v[0].squaredNorm();
  }
  const Eigen::Vector3d center = m.fullPivLu().solve(rhs);
  TetOracle o{};
  o.volume = std::abs((t.v[1] - t.v[0]).dot((t.v[2] - t.v[0]).cross(t.v[3] - t.v[0]))) / 6.0;
  const int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (const auto& f : faces)
    o.area_sum += 0.5 * (t.v[f[1]] - t.v[f[0]]).cross(t.v[f[2]] - t.v[f[0]]).norm();
  o.circumradius = (center - t.v[0]).norm();
  o.inradius = 3.0 * o.volume / o.area_sum;
  return o;
}

inline double oracle_tet_mu(const Tetrahedron& t) {
  const TetOracle o = oracle_tet(t);
  return o.circumradius / (3.0 * o.inradius);
}

inline Triangle random_triangle(Rng& rng, double max_mu = 50.0) {
  for (;;) {
    Triangle t;
    for (auto& p : t.v) p = Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (rrmesh::signed_area(t) < 0) std::swap(t.v[1], t.v[2]);
    if (!rrmesh::is_valid(t)) continue;
    if (oracle_triangle_mu(t) <= max_mu) return t;
  }
}

inline Tetrahedron random_tet(Rng& rng, double max_mu = 50.0) {
  for (;;) {
    Tetrahedron t;
    for (auto& p : t.v) p = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    if (rrmesh::signed_volume(t) < 0) std::swap(t.v[2], t.v[3]);
    if (!rrmesh::is_valid(t)) continue;
    if (oracle_tet_mu(t) <= max_mu) return t;
  }
}

// Relative error between two vectors, normalised by the larger norm.
template <class A, class B>
double rel_err(const A& a, const B& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

}  // namespace test_support
