#include "rrmesh/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrmesh/error.hpp"

namespace rrmesh {
namespace {

void require_valid(double measure, double diam, int d, const char* kind) {
  const double threshold = kDegeneracyFactor * std::pow(diam, d);
  if (!(measure > threshold) || !std::isfinite(measure)) {
    throw DegenerateElement(std::string(kind) + " measure " + std::to_string(measure) +
                            " at or below degeneracy threshold");
  }
}

Tetrahedron centered(const Tetrahedron& tet) {
  const Vec3 centroid = 0.25 * (tet.v[0] + tet.v[1] + tet.v[2] + tet.v[3]);
  Tetrahedron out;
  for (int i = 0; i < 4; ++i) out.v[i] = tet.v[i] - centroid;
  return out;
}

std::array<Vec3, 4> grad_d0_norm(const Vec3& v10, const Vec3& v20, const Vec3& v30, const Vec3& d0,
                                 double d0n, const std::array<double, 3>& c) {
  const double n10 = v10.squaredNorm(), n20 = v20.squaredNorm(), n30 = v30.squaredNorm();
  const Vec3 g_v10 = (2.0 * c[0] * v10 + d0.cross(n20 * v30 - n30 * v20)) / d0n;
  const Vec3 g_v20 = (2.0 * c[1] * v20 + d0.cross(n30 * v10 - n10 * v30)) / d0n;
  const Vec3 g_v30 = (2.0 * c[2] * v30 + d0.cross(n10 * v20 - n20 * v10)) / d0n;
  return {g_v10 + g_v20 + g_v30, -g_v10, -g_v20, -g_v30};
}

// d(area)/d(a) = n x (c - b) / 2 for the face a->b->c, summed over faces.
std::array<Vec3, 4> grad_area_sum(const std::array<Vec3, 4>& x) {
  static constexpr std::array<std::array<int, 3>, 4> kFaces = {
      {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};
  std::array<Vec3, 4> g;
  g.fill(Vec3::Zero());
  for (const auto& f : kFaces) {
    const Vec3 n = (x[f[1]] - x[f[0]]).cross(x[f[2]] - x[f[0]]).normalized();
    for (int r = 0; r < 3; ++r) {
      const int a = f[r];
      const int b = f[(r + 1) % 3];
      const int c = f[(r + 2) % 3];
      g[a] += 0.5 * n.cross(x[c] - x[b]);
    }
  }
  return g;
}

std::array<Vec3, 4> grad_volume(const std::array<Vec3, 4>& x) {
  return {(x[2].cross(x[1]) + x[3].cross(x[2]) + x[1].cross(x[3])) / 6.0,
          (x[3].cross(x[0]) + x[0].cross(x[2]) + x[2].cross(x[3])) / 6.0,
          (x[1].cross(x[0]) + x[3].cross(x[1]) + x[0].cross(x[3])) / 6.0,
          (x[2].cross(x[0]) + x[0].cross(x[1]) + x[1].cross(x[2])) / 6.0};
}

}  // namespace

double signed_area(const Triangle& tri) {
  const Vec2 e1 = tri.v[1] - tri.v[0];
  const Vec2 e2 = tri.v[2] - tri.v[0];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double signed_volume(const Tetrahedron& tet) {
  const Vec3 a = tet.v[1] - tet.v[0];
  const Vec3 b = tet.v[2] - tet.v[0];
  const Vec3 c = tet.v[3] - tet.v[0];
  return a.dot(b.cross(c)) / 6.0;
}

double diameter(const Triangle& tri) {
  return std::max({(tri.v[0] - tri.v[1]).norm(), (tri.v[1] - tri.v[2]).norm(),
                   (tri.v[2] - tri.v[0]).norm()});
}

double diameter(const Tetrahedron& tet) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) d = std::max(d, (tet.v[i] - tet.v[j]).norm());
  return d;
}

bool is_valid(const Triangle& tri) {
  const double a = signed_area(tri);
  const double d = diameter(tri);
  return std::isfinite(a) && a > kDegeneracyFactor * d * d;
}

bool is_valid(const Tetrahedron& tet) {
  const double v = signed_volume(tet);
  const double d = diameter(tet);
  return std::isfinite(v) && v > kDegeneracyFactor * d * d * d;
}

double triangle_radius_ratio(const Triangle& tri) {
  const double area = signed_area(tri);
  require_valid(area, diameter(tri), 2, "triangle");
  const double l0 = (tri.v[1] - tri.v[2]).norm();
  const double l1 = (tri.v[2] - tri.v[0]).norm();
  const double l2 = (tri.v[0] - tri.v[1]).norm();
  return (l0 + l1 + l2) * (l0 * l1 * l2) / (16.0 * area * area);
}

LocalGradient2D triangle_gradient(const Triangle& tri) {
  const double area = signed_area(tri);
  require_valid(area, diameter(tri), 2, "triangle");
  const auto& x = tri.v;
  const std::array<double, 3> l = {(x[1] - x[2]).norm(), (x[2] - x[0]).norm(),
                                   (x[0] - x[1]).norm()};
  const double p = l[0] + l[1] + l[2];
  const double q = l[0] * l[1] * l[2];

  LocalGradient2D out;
  out.mu = p * q / (16.0 * area * area);
  const double c = 1.0 / area;
  std::array<double, 3> ci{};
  for (int i = 0; i < 3; ++i) ci[i] = 1.0 / (p * l[i]) + 1.0 / (l[i] * l[i]);

  const double mu = out.mu;
  out.a << ci[1] + ci[2], -ci[2], -ci[1],
           -ci[2], ci[2] + ci[0], -ci[0],
           -ci[1], -ci[0], ci[0] + ci[1];
  out.a *= mu;
  out.b << 0.0, -c, c,
           c, 0.0, -c,
           -c, c, 0.0;
  out.b *= mu;

  // W rotates by +90 degrees.
  const auto rot = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    // c_k weights the edge to x_j (opposite x_k), c_j the edge to x_k.
    out.grad[i] = mu * (ci[j] * (x[i] - x[k]) + ci[k] * (x[i] - x[j]) + c * rot(x[j] - x[k]));
  }
  return out;
}

TetMeasures tet_measures(const Tetrahedron& tet) {
  TetMeasures m;
  m.volume = signed_volume(tet);
  require_valid(m.volume, diameter(tet), 3, "tetrahedron");
  const auto& x = tet.v;
  m.face_areas[0] = 0.5 * (x[2] - x[1]).cross(x[3] - x[1]).norm();
  m.face_areas[1] = 0.5 * (x[2] - x[0]).cross(x[3] - x[0]).norm();
  m.face_areas[2] = 0.5 * (x[1] - x[0]).cross(x[3] - x[0]).norm();
  m.face_areas[3] = 0.5 * (x[1] - x[0]).cross(x[2] - x[0]).norm();
  m.area_sum = m.face_areas[0] + m.face_areas[1] + m.face_areas[2] + m.face_areas[3];

  const Vec3 v10 = x[0] - x[1];
  const Vec3 v20 = x[0] - x[2];
  const Vec3 v30 = x[0] - x[3];
  m.d0 = v30.squaredNorm() * v10.cross(v20) + v10.squaredNorm() * v20.cross(v30) +
         v20.squaredNorm() * v30.cross(v10);
  m.circumradius = m.d0.norm() / (12.0 * m.volume);
  m.inradius = 3.0 * m.volume / m.area_sum;
  return m;
}

double tet_radius_ratio(const Tetrahedron& tet) {
  const TetMeasures m = tet_measures(tet);
  return m.area_sum * m.d0.norm() / (108.0 * m.volume * m.volume);
}

TetGradientTerms tet_gradient_terms(const Tetrahedron& input) {
  // Every quantity below is translation invariant and every matrix has zero
  // row sums, so working about the centroid only improves conditioning.
  const Tetrahedron tet = centered(input);
  const auto& x = tet.v;

  TetGradientTerms t;
  t.measures = tet_measures(tet);
  const TetMeasures& ms = t.measures;
  const double vol = ms.volume;
  const double d0n = ms.d0.norm();
  const double s = ms.area_sum;
  const auto& sa = ms.face_areas;
  t.mu = s * d0n / (108.0 * vol * vol);

  // v[i][j] = x_j - x_i
  std::array<std::array<Vec3, 4>, 4> v;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) v[i][j] = x[j] - x[i];
  const Vec3& v10 = v[1][0];
  const Vec3& v20 = v[2][0];
  const Vec3& v30 = v[3][0];
  const double n10 = v10.squaredNorm();
  const double n20 = v20.squaredNorm();
  const double n30 = v30.squaredNorm();
  const Vec3& d0 = ms.d0;

  // grad |d0|
  const double c23 = d0.dot(v20.cross(v30));
  const double c31 = d0.dot(v30.cross(v10));
  const double c12 = d0.dot(v10.cross(v20));
  const double k23 = n30 - n20;
  const double k31 = n10 - n30;
  const double k12 = n20 - n10;
  t.c = {c23, c31, c12};
  t.k = {k23, k31, k12};

  t.grad_d0_norm = grad_d0_norm(v10, v20, v30, d0, d0n, {c23, c31, c12});
  const double csum = c23 + c31 + c12;
  t.m << 2 * csum, -2 * c23, -2 * c31, -2 * c12,
         -2 * c23, 2 * c23, 0.0, 0.0,
         -2 * c31, 0.0, 2 * c31, 0.0,
         -2 * c12, 0.0, 0.0, 2 * c12;
  t.k_matrix << 0.0, -k23, -k31, -k12,
                k23, 0.0, -n30, n20,
                k31, n30, 0.0, -n10,
                k12, -n20, n10, 0.0;

  t.grad_area_sum = grad_area_sum(x);

  // S from the p_i / q_ij coefficients.
  const auto sq = [&](int i, int j) { return v[i][j].squaredNorm(); };
  const auto dt = [&](int i, int j, int k, int l) { return v[i][j].dot(v[k][l]); };
  const double p0 = sq(3, 1) / (4 * sa[2]) + sq(2, 1) / (4 * sa[3]) + sq(3, 2) / (4 * sa[1]);
  const double p1 = sq(3, 2) / (4 * sa[0]) + sq(0, 2) / (4 * sa[3]) + sq(3, 0) / (4 * sa[2]);
  const double p2 = sq(3, 0) / (4 * sa[1]) + sq(1, 0) / (4 * sa[3]) + sq(3, 1) / (4 * sa[0]);
  const double p3 = sq(1, 0) / (4 * sa[2]) + sq(2, 0) / (4 * sa[1]) + sq(2, 1) / (4 * sa[0]);
  const double q01 = -(dt(3, 1, 3, 0) / (4 * sa[2]) + dt(2, 1, 2, 0) / (4 * sa[3]));
  const double q02 = -(dt(3, 2, 3, 0) / (4 * sa[1]) + dt(1, 2, 1, 0) / (4 * sa[3]));
  const double q03 = -(dt(2, 3, 2, 0) / (4 * sa[1]) + dt(1, 3, 1, 0) / (4 * sa[2]));
  const double q12 = -(dt(3, 2, 3, 1) / (4 * sa[0]) + dt(0, 2, 0, 1) / (4 * sa[3]));
  const double q13 = -(dt(0, 3, 0, 1) / (4 * sa[2]) + dt(2, 3, 2, 1) / (4 * sa[0]));
  const double q23 = -(dt(1, 3, 1, 2) / (4 * sa[0]) + dt(0, 3, 0, 2) / (4 * sa[1]));
  t.s << p0, q01, q02, q03,
         q01, p1, q12, q13,
         q02, q12, p2, q23,
         q03, q13, q23, p3;

  t.grad_volume = grad_volume(x);

  for (int a = 0; a < 3; ++a) {
    const double w0 = x[0][a], w1 = x[1][a], w2 = x[2][a], w3 = x[3][a];
    t.c_matrix[a] << 0.0, w2, w3, w1,
                     w3, 0.0, w0, w2,
                     w1, w3, 0.0, w0,
                     w2, w0, w1, 0.0;
  }
  return t;
}

TetMuGradient tet_mu_gradient(const Tetrahedron& input) {
  const Tetrahedron tet = centered(input);
  const auto& x = tet.v;
  const TetMeasures ms = tet_measures(tet);
  const double d0n = ms.d0.norm();
  const double s = ms.area_sum;
  const double vol = ms.volume;
  const Vec3 v10 = x[0] - x[1], v20 = x[0] - x[2], v30 = x[0] - x[3];
  const std::array<double, 3> c = {ms.d0.dot(v20.cross(v30)), ms.d0.dot(v30.cross(v10)),
                                   ms.d0.dot(v10.cross(v20))};
  const auto gd = grad_d0_norm(v10, v20, v30, ms.d0, d0n, c);
  const auto gs = grad_area_sum(x);
  const auto gv = grad_volume(x);
  TetMuGradient out;
  out.mu = s * d0n / (108.0 * vol * vol);
  for (int i = 0; i < 4; ++i)
    out.grad[i] = out.mu * (gd[i] / d0n + gs[i] / s - (2.0 / vol) * gv[i]);
  return out;
}

Eigen::Matrix<double, 12, 12> volume_gradient_operator(const TetGradientTerms& t) {
  Eigen::Matrix<double, 12, 12> c = Eigen::Matrix<double, 12, 12>::Zero();
  const auto& [c0, c1, c2] = t.c_matrix;
  c.block<4, 4>(0, 4) = -c2;
  c.block<4, 4>(0, 8) = c1;
  c.block<4, 4>(4, 0) = c2;
  c.block<4, 4>(4, 8) = -c0;
  c.block<4, 4>(8, 0) = -c1;
  c.block<4, 4>(8, 4) = c0;
  c /= 6.0;
  return 0.5 * (c + c.transpose());
}

LocalGradient3D tet_gradient(const Tetrahedron& tet) {
  const TetGradientTerms t = tet_gradient_terms(tet);
  const double vol = t.measures.volume;
  const Vec3& d0 = t.measures.d0;
  const double d0n2 = d0.squaredNorm();
  const double d0n = std::sqrt(d0n2);
  const double s = t.measures.area_sum;

  LocalGradient3D out;
  out.mu = t.mu;
  for (int i = 0; i < 4; ++i) {
    out.grad[i] = t.mu * (t.grad_d0_norm[i] / d0n + t.grad_area_sum[i] / s -
                          (2.0 / vol) * t.grad_volume[i]);
  }

  out.a = t.m / d0n2 + t.s / s;
  const Eigen::Matrix<double, 12, 12> e = volume_gradient_operator(t);
  const Eigen::Matrix4d e_xy = e.block<4, 4>(0, 4);
  const Eigen::Matrix4d e_xz = e.block<4, 4>(0, 8);
  const Eigen::Matrix4d e_yz = e.block<4, 4>(4, 8);
  const Eigen::Matrix4d kk = t.k_matrix / d0n2;
  out.b[0] = -d0.x() * kk - (2.0 / vol) * e_yz;
  out.b[1] = d0.y() * kk - (2.0 / vol) * e_xz;
  out.b[2] = -d0.z() * kk - (2.0 / vol) * e_xy;
  return out;
}

Eigen::Matrix4d tet_abs_local_matrix(const Tetrahedron& tet) {
  const TetGradientTerms t = tet_gradient_terms(tet);
  const double d0n2 = t.measures.d0.squaredNorm();
  const double s = t.measures.area_sum;
  const double a23 = std::abs(t.c[0]);
  const double a31 = std::abs(t.c[1]);
  const double a12 = std::abs(t.c[2]);

  Eigen::Matrix4d m_abs;
  m_abs << 2 * (a23 + a31 + a12), -2 * a23, -2 * a31, -2 * a12,
           -2 * a23, 2 * a23, 0.0, 0.0,
           -2 * a31, 0.0, 2 * a31, 0.0,
           -2 * a12, 0.0, 0.0, 2 * a12;

  Eigen::Matrix4d s_abs = Eigen::Matrix4d::Zero();
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double w = std::abs(t.s(i, j));
      s_abs(i, j) = s_abs(j, i) = -w;
      s_abs(i, i) += w;
      s_abs(j, j) += w;
    }
  }
  return m_abs / d0n2 + s_abs / s;
}

}  // namespace rrmesh
