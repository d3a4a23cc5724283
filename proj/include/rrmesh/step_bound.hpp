#pragma once

#include <cstddef>
#include <span>

#include "rrmesh/mesh.hpp"

namespace rrmesh {

/// Largest lambda such that every cell keeps a positive signed measure for all
/// steps in [0, lambda] along `direction` (coordinate-major, like `coords`).
/// Returns +inf when no cell can invert along the direction.
double max_safe_step(int dim, std::span<const int> cells, std::size_t nv,
                     std::span<const double> coords, std::span<const double> direction);

double max_safe_step(const SimplexMesh& mesh, std::span<const double> direction);

}  // namespace rrmesh
