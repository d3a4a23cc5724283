#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rrmesh/mesh.hpp"
#include "rrmesh/sparse.hpp"

namespace rrmesh {

// Global energy F = (1/N_c) sum_n mu_n over a mesh. Coordinate vectors are
// coordinate-major (see coordinate_vector); `topology` supplies cells and
// constraints while its stored points are ignored by the *_at variants.

/// F and its gradient by per-element scatter-add. Throws DegenerateElement
/// naming the first degenerate or inverted cell.
double energy_and_gradient(const SimplexMesh& topology, std::span<const double> coords,
                           std::span<double> gradient);
double energy(const SimplexMesh& topology, std::span<const double> coords);

/// Zeroes Fixed components and removes the normal component at SlidePlane
/// vertices, in place.
void project_to_constraints(const SimplexMesh& topology, std::span<double> v);

/// Assembled gradient matrix G_F:
///   2D: [ A   B ]        3D: [ A   B2  B1 ]
///       [-B   A ]            [-B2  A   B0 ]
///                            [-B1 -B0  A  ]
/// with A symmetric and every B antisymmetric, so gradient = G_F V.
struct GlobalGradientSystem {
  int dim = 0;
  double energy = 0.0;
  std::vector<double> coords;
  CsrMatrix a;
  std::vector<CsrMatrix> b;  // B (2D) or B0, B1, B2 (3D)
  std::vector<double> gradient;       // G_F V, all vertices
  std::vector<double> free_gradient;  // gradient after project_to_constraints
};

GlobalGradientSystem assemble(const SimplexMesh& mesh);
GlobalGradientSystem assemble_at(const SimplexMesh& topology, std::span<const double> coords);

/// y = G_F x for the block layout above.
std::vector<double> apply_gradient_matrix(const GlobalGradientSystem& sys,
                                          std::span<const double> x);

/// Reduced SPD matrix acting identically on each coordinate block. Rows and
/// columns of Fixed vertices are removed; SlidePlane vertices stay.
struct Preconditioner {
  CsrMatrix p;
  std::vector<int> reduced_index;  // per vertex, -1 when fixed
  std::vector<int> free_vertices;  // reduced index -> vertex
};

/// 2D uses the assembled A; 3D uses sum_n (mu_n / N_c) A_n^abs. Throws
/// NoFixedVertices or DisconnectedMesh when the reduced matrix cannot be
/// positive definite.
Preconditioner assemble_preconditioner(const SimplexMesh& mesh);
Preconditioner assemble_preconditioner_at(const SimplexMesh& topology,
                                          std::span<const double> coords);

struct SpdAudit {
  std::size_t rows = 0;
  double norm = 0.0;                // Frobenius norm
  double symmetry_residual = 0.0;   // max |P - P^T|
  double min_margin = 0.0;          // min_i (P_ii - sum_{j != i} |P_ij|)
  std::size_t negative_diagonals = 0;
  std::size_t weakly_dominant_rows = 0;   // margin >= -1e-12 ||P||
  std::size_t strictly_dominant_rows = 0; // margin > 1e-12 ||P||
  bool connected = false;                 // adjacency graph of P

  bool symmetric() const { return symmetry_residual <= 1e-12 * norm; }
  bool all_weakly_dominant() const { return weakly_dominant_rows == rows; }
  bool passes() const {
    return symmetric() && all_weakly_dominant() && negative_diagonals == 0 &&
           (rows == 0 || strictly_dominant_rows > 0) && connected;
  }
};

SpdAudit spd_audit(const Preconditioner& p);
SpdAudit spd_audit(const CsrMatrix& p);

}  // namespace rrmesh
