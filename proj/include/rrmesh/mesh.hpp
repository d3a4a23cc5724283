#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rrmesh/geometry.hpp"

namespace rrmesh {

enum class ConstraintKind : std::uint8_t { Free, Fixed, SlidePlane };

/// Per-vertex motion constraint. SlidePlane carries the unit normal of the
/// plane the vertex may slide in (only the first `dim` components are used).
struct Constraint {
  ConstraintKind kind = ConstraintKind::Free;
  std::array<double, 3> normal{0.0, 0.0, 0.0};

  static Constraint free() { return {}; }
  static Constraint fixed() { return {ConstraintKind::Fixed, {0.0, 0.0, 0.0}}; }
  static Constraint slide(std::array<double, 3> n) { return {ConstraintKind::SlidePlane, n}; }

  bool operator==(const Constraint&) const = default;
};

/// Triangulation (dim 2) or tetrahedralization (dim 3). Points are stored
/// interleaved (x0 y0 [z0] x1 y1 ...); cells hold dim+1 vertex indices each.
class SimplexMesh {
 public:
  SimplexMesh() = default;
  /// Checks array shapes only; use validate() for the geometric invariants.
  SimplexMesh(int dim, std::vector<double> points, std::vector<int> cells);

  int dim() const noexcept { return dim_; }
  int cell_size() const noexcept { return dim_ + 1; }
  std::size_t num_vertices() const noexcept { return dim_ ? points_.size() / dim_ : 0; }
  std::size_t num_cells() const noexcept { return dim_ ? cells_.size() / (dim_ + 1) : 0; }

  std::span<const double> point(std::size_t v) const {
    return {points_.data() + v * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<double> point(std::size_t v) {
    return {points_.data() + v * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const int> cell(std::size_t c) const {
    return {cells_.data() + c * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }
  std::span<int> cell(std::size_t c) {
    return {cells_.data() + c * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }

  const std::vector<double>& points() const noexcept { return points_; }
  std::vector<double>& points() noexcept { return points_; }
  const std::vector<int>& cells() const noexcept { return cells_; }

  const Constraint& constraint(std::size_t v) const { return constraints_[v]; }
  void set_constraint(std::size_t v, Constraint c) { constraints_[v] = c; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  void set_constraints(std::vector<Constraint> c);

  Triangle triangle(std::size_t c) const;
  Tetrahedron tetrahedron(std::size_t c) const;
  /// Signed area (2D) or volume (3D) of a cell.
  double cell_measure(std::size_t c) const;

  bool operator==(const SimplexMesh&) const = default;

 private:
  int dim_ = 0;
  std::vector<double> points_;
  std::vector<int> cells_;
  std::vector<Constraint> constraints_;
};

/// Coordinate-major flattening V = [X; Y; (Z)] used by the energy and optimizers.
std::vector<double> coordinate_vector(const SimplexMesh& mesh);
void set_coordinate_vector(SimplexMesh& mesh, std::span<const double> coords);

/// Element extraction from a coordinate-major vector.
Triangle triangle_at(std::span<const double> coords, std::size_t nv, std::span<const int> cell);
Tetrahedron tetrahedron_at(std::span<const double> coords, std::size_t nv,
                           std::span<const int> cell);
double cell_measure_at(int dim, std::span<const double> coords, std::size_t nv,
                       std::span<const int> cell);

struct Violation {
  enum class Rule {
    IndexOutOfRange,
    RepeatedVertex,
    NegativeOrientation,
    DegenerateCell,
    NonManifoldFacet,
    BadConstraint,
  };
  Rule rule;
  std::size_t index;  // cell index, or vertex index for BadConstraint
  std::string message;
};

std::vector<Violation> validate(const SimplexMesh& mesh);

/// Reorders negatively oriented cells by swapping their last two vertices.
/// Returns the indices of the repaired cells.
std::vector<std::size_t> repair_orientation(SimplexMesh& mesh);

/// Boundary facets (facets owned by exactly one cell), oriented so that their
/// normal points out of the owning cell.
struct BoundaryFacet {
  std::array<int, 3> vertices{-1, -1, -1};  // dim entries are used
  std::size_t cell = 0;
};

std::vector<BoundaryFacet> boundary_facets(const SimplexMesh& mesh);
std::vector<bool> boundary_vertices(const SimplexMesh& mesh);

/// Vertex adjacency (sorted neighbour lists) induced by the cells.
std::vector<std::vector<int>> vertex_neighbors(const SimplexMesh& mesh);
/// Cells incident to each vertex, in ascending order.
std::vector<std::vector<std::size_t>> vertex_cells(const SimplexMesh& mesh);
/// True when the cells form a single connected component (through shared vertices).
bool is_connected(const SimplexMesh& mesh);

enum class BoundaryPolicy { FixAll, SlidePlanar };

/// Planarity tolerance used by SlidePlanar, in degrees.
inline constexpr double kPlanarityToleranceDeg = 1.0;
/// Boundary edges bending more than this separate patches (sharp features).
inline constexpr double kFeatureAngleDeg = 30.0;

/// Constraint assignment for a boundary policy. Interior vertices are Free.
/// Throws NonPlanarPatch when SlidePlanar meets a curved boundary patch.
std::vector<Constraint> classify_boundary(const SimplexMesh& mesh, BoundaryPolicy policy);
void apply_boundary_policy(SimplexMesh& mesh, BoundaryPolicy policy);

}  // namespace rrmesh
