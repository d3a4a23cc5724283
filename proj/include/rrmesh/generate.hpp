#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "rrmesh/mesh.hpp"

namespace rrmesh {

enum class GeneratorKind { Equilateral, Square, Cube };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Square;
  int n = 1;
};

/// Equilateral: rhombic patch of n x n lattice cells with unit edges (2n^2 triangles).
/// Square: unit square, n x n squares each split into two right triangles.
/// Cube: unit cube, n^3 voxels with six tetrahedra each.
/// Constraints are left Free. Throws InvalidSpec when n < 1.
SimplexMesh gen_mesh(const GeneratorSpec& spec);

/// Splits every triangle into four through its edge midpoints. 2D only;
/// constraints are reset to Free.
SimplexMesh refine_uniform(const SimplexMesh& mesh);

struct VertexDisplace {
  struct Move {
    int vertex;
    std::array<double, 3> offset;
  };
  std::vector<Move> moves;
};

struct RandomJitter {
  double amplitude = 0.0;  // fraction of the shortest incident edge
  std::uint64_t seed = 0;
};

struct PlantSliver {
  int count = 1;
  double eps = 0.01;  // residual height as a fraction of the mean edge length
};

using PerturbMode = std::variant<VertexDisplace, RandomJitter, PlantSliver>;

/// VertexDisplace throws WouldInvert if any cell would lose positive
/// orientation. RandomJitter moves interior vertices only, halving a vertex's
/// offset until its cells stay valid. PlantSliver flattens interior
/// tetrahedra (all four vertices interior, 3D only) without inverting
/// neighbours; throws InvalidSpec when not enough candidates exist.
SimplexMesh perturb_mesh(const SimplexMesh& mesh, const PerturbMode& mode);

/// PlantSliver that also reports the flattened cells.
SimplexMesh plant_slivers(const SimplexMesh& mesh, const PlantSliver& spec,
                          std::vector<std::size_t>* planted_cells);

}  // namespace rrmesh
