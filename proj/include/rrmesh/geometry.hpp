#pragma once

// Per-element geometry of triangles and tetrahedra: measures, circum/in-radii,
// the radius-ratio metric mu = R / (d r) and its analytical gradient written as
// local block matrices acting on the element coordinate vector.
//
// Element coordinate vectors are coordinate-major:
//   2D: V_n = [x0 x1 x2 | y0 y1 y2]
//   3D: V_n = [x0 .. x3 | y0 .. y3 | z0 .. z3]
// and edge vectors follow v_ij = x_j - x_i (so v_10 = x_0 - x_1).

#include <array>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace rrmesh {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

struct Triangle {
  std::array<Vec2, 3> v;
};

struct Tetrahedron {
  std::array<Vec3, 4> v;
};

/// Relative degeneracy threshold: a d-simplex is rejected when its signed
/// measure is <= kDegeneracyFactor * diameter^d.
inline constexpr double kDegeneracyFactor = 1e-14;

double signed_area(const Triangle& tri);
double signed_volume(const Tetrahedron& tet);
double diameter(const Triangle& tri);
double diameter(const Tetrahedron& tet);

/// True when the element is positively oriented and above the degeneracy threshold.
bool is_valid(const Triangle& tri);
bool is_valid(const Tetrahedron& tet);

double triangle_radius_ratio(const Triangle& tri);

/// Gradient of mu for a triangle. The local matrices already carry the mu
/// factor: grad = [A B; -B A] V_n.
struct LocalGradient2D {
  double mu = 0.0;
  Eigen::Matrix3d a;  // symmetric, zero row sums
  Eigen::Matrix3d b;  // antisymmetric
  std::array<Vec2, 3> grad;
};

LocalGradient2D triangle_gradient(const Triangle& tri);

struct TetMeasures {
  double volume = 0.0;
  std::array<double, 4> face_areas{};  // s_i is the face opposite vertex i
  double area_sum = 0.0;
  double circumradius = 0.0;
  double inradius = 0.0;
  Vec3 d0 = Vec3::Zero();  // |d0| = 12 |tau| R
};

TetMeasures tet_measures(const Tetrahedron& tet);
double tet_radius_ratio(const Tetrahedron& tet);

/// Gradient of mu for a tetrahedron in the global block layout
///   grad = mu * [ A   B2  B1 ]
///               [-B2  A   B0 ] V_n
///               [-B1 -B0  A  ]
/// The local matrices do not carry the mu factor.
struct LocalGradient3D {
  double mu = 0.0;
  Eigen::Matrix4d a;                // symmetric
  std::array<Eigen::Matrix4d, 3> b; // b[i] = B_i, antisymmetric
  std::array<Vec3, 4> grad;
};

/// The pieces the tetrahedron gradient is built from. Exposed so each
/// sub-gradient and each structured matrix can be checked on its own.
struct TetGradientTerms {
  TetMeasures measures;
  double mu = 0.0;
  std::array<double, 3> c{};  // c23, c31, c12
  std::array<double, 3> k{};  // k23, k31, k12
  Eigen::Matrix4d m;          // symmetric, grad|d0| "diagonal" part
  Eigen::Matrix4d k_matrix;   // antisymmetric, grad|d0| cross-product part
  Eigen::Matrix4d s;          // symmetric, grad of the face-area sum
  std::array<Eigen::Matrix4d, 3> c_matrix;  // C0, C1, C2 of the volume cubic form
  std::array<Vec3, 4> grad_d0_norm;  // grad |d0|
  std::array<Vec3, 4> grad_area_sum; // grad s
  std::array<Vec3, 4> grad_volume;   // grad |tau|, cross-product form
};

TetGradientTerms tet_gradient_terms(const Tetrahedron& tet);

/// mu and its per-vertex gradient only, without the matrix forms.
struct TetMuGradient {
  double mu = 0.0;
  std::array<Vec3, 4> grad;
};
TetMuGradient tet_mu_gradient(const Tetrahedron& tet);
LocalGradient3D tet_gradient(const Tetrahedron& tet);

/// Symmetrised volume-gradient operator E = (C + C^T)/2 (12x12, coordinate-major).
Eigen::Matrix<double, 12, 12> volume_gradient_operator(const TetGradientTerms& terms);

/// A_n^abs = M^abs / |d0|^2 + S^abs / s. Symmetric, nonnegative diagonal,
/// weakly diagonally dominant rows. Does not carry the mu factor.
Eigen::Matrix4d tet_abs_local_matrix(const Tetrahedron& tet);

}  // namespace rrmesh
