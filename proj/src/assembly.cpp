#include "rrmesh/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrmesh/error.hpp"
#include "rrmesh/geometry.hpp"

namespace rrmesh {
namespace {

void check_coords(const SimplexMesh& topology, std::span<const double> coords) {
  if (coords.size() != topology.num_vertices() * topology.dim())
    throw InvalidMesh("coordinate vector length does not match the mesh");
  if (topology.num_cells() == 0) throw EmptyMesh("mesh has no cells");
}

template <class Fn>
auto with_cell_index(std::size_t c, Fn&& fn) {
  try {
    return fn();
  } catch (const DegenerateElement& e) {
    throw DegenerateElement("cell " + std::to_string(c) + ": " + e.what(), c);
  }
}

template <int N>
void scatter(std::vector<Triplet>& out, std::span<const int> cell, const Eigen::Matrix<double, N, N>& m,
             double w) {
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) out.push_back({cell[i], cell[j], w * m(i, j)});
}

}  // namespace

double energy_and_gradient(const SimplexMesh& topology, std::span<const double> coords,
                           std::span<double> gradient) {
  check_coords(topology, coords);
  const std::size_t nv = topology.num_vertices();
  const std::size_t nc = topology.num_cells();
  const int d = topology.dim();
  if (gradient.size() != coords.size()) throw InvalidMesh("gradient length does not match");
  std::fill(gradient.begin(), gradient.end(), 0.0);
  const double w = 1.0 / static_cast<double>(nc);
  double sum = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto cell = topology.cell(c);
    if (d == 2) {
      const auto lg = with_cell_index(c, [&] { return triangle_gradient(triangle_at(coords, nv, cell)); });
      sum += lg.mu;
      for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 2; ++a) gradient[a * nv + cell[i]] += w * lg.grad[i][a];
    } else {
      const auto lg = with_cell_index(c, [&] { return tet_mu_gradient(tetrahedron_at(coords, nv, cell)); });
      sum += lg.mu;
      for (int i = 0; i < 4; ++i)
        for (int a = 0; a < 3; ++a) gradient[a * nv + cell[i]] += w * lg.grad[i][a];
    }
  }
  return sum * w;
}

double energy(const SimplexMesh& topology, std::span<const double> coords) {
  check_coords(topology, coords);
  const std::size_t nv = topology.num_vertices();
  const std::size_t nc = topology.num_cells();
  double sum = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto cell = topology.cell(c);
    sum += with_cell_index(c, [&] {
      return topology.dim() == 2 ? triangle_radius_ratio(triangle_at(coords, nv, cell))
                                 : tet_radius_ratio(tetrahedron_at(coords, nv, cell));
    });
  }
  return sum / static_cast<double>(nc);
}

void project_to_constraints(const SimplexMesh& topology, std::span<double> v) {
  const std::size_t nv = topology.num_vertices();
  const int d = topology.dim();
  for (std::size_t i = 0; i < nv; ++i) {
    const Constraint& c = topology.constraint(i);
    if (c.kind == ConstraintKind::Fixed) {
      for (int a = 0; a < d; ++a) v[a * nv + i] = 0.0;
    } else if (c.kind == ConstraintKind::SlidePlane) {
      double dn = 0.0;
      for (int a = 0; a < d; ++a) dn += v[a * nv + i] * c.normal[a];
      for (int a = 0; a < d; ++a) v[a * nv + i] -= dn * c.normal[a];
    }
  }
}

GlobalGradientSystem assemble_at(const SimplexMesh& topology, std::span<const double> coords) {
  check_coords(topology, coords);
  const std::size_t nv = topology.num_vertices();
  const std::size_t nc = topology.num_cells();
  const int d = topology.dim();
  const double inv_nc = 1.0 / static_cast<double>(nc);

  GlobalGradientSystem sys;
  sys.dim = d;
  sys.coords.assign(coords.begin(), coords.end());
  std::vector<Triplet> ta;
  std::vector<std::vector<Triplet>> tb(d == 2 ? 1 : 3);
  const std::size_t k = d + 1;
  ta.reserve(nc * k * k);
  for (auto& t : tb) t.reserve(nc * k * k);

  double sum = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto cell = topology.cell(c);
    if (d == 2) {
      const auto lg = with_cell_index(c, [&] { return triangle_gradient(triangle_at(coords, nv, cell)); });
      sum += lg.mu;
      scatter<3>(ta, cell, lg.a, inv_nc);
      scatter<3>(tb[0], cell, lg.b, inv_nc);
    } else {
      const auto lg = with_cell_index(c, [&] { return tet_gradient(tetrahedron_at(coords, nv, cell)); });
      sum += lg.mu;
      const double w = lg.mu * inv_nc;
      scatter<4>(ta, cell, lg.a, w);
      for (int i = 0; i < 3; ++i) scatter<4>(tb[i], cell, lg.b[i], w);
    }
  }
  sys.energy = sum * inv_nc;
  sys.a = CsrMatrix::from_triplets(nv, nv, ta);
  for (const auto& t : tb) sys.b.push_back(CsrMatrix::from_triplets(nv, nv, t));
  sys.gradient = apply_gradient_matrix(sys, coords);
  sys.free_gradient = sys.gradient;
  project_to_constraints(topology, sys.free_gradient);
  return sys;
}

GlobalGradientSystem assemble(const SimplexMesh& mesh) {
  return assemble_at(mesh, coordinate_vector(mesh));
}

std::vector<double> apply_gradient_matrix(const GlobalGradientSystem& sys,
                                          std::span<const double> x) {
  const std::size_t nv = sys.a.rows();
  const int d = sys.dim;
  if (x.size() != nv * d) throw InvalidMesh("vector length does not match the system");
  std::vector<double> y(nv * d, 0.0);
  std::vector<double> tmp(nv);
  const auto block = [&](int a) { return x.subspan(a * nv, nv); };
  const auto add = [&](int row, const CsrMatrix& m, int col, double sign) {
    m.multiply(block(col), tmp);
    for (std::size_t i = 0; i < nv; ++i) y[row * nv + i] += sign * tmp[i];
  };
  for (int a = 0; a < d; ++a) add(a, sys.a, a, 1.0);
  if (d == 2) {
    add(0, sys.b[0], 1, 1.0);
    add(1, sys.b[0], 0, -1.0);
  } else {
    add(0, sys.b[2], 1, 1.0);
    add(0, sys.b[1], 2, 1.0);
    add(1, sys.b[2], 0, -1.0);
    add(1, sys.b[0], 2, 1.0);
    add(2, sys.b[1], 0, -1.0);
    add(2, sys.b[0], 1, -1.0);
  }
  return y;
}

Preconditioner assemble_preconditioner_at(const SimplexMesh& topology,
                                          std::span<const double> coords) {
  check_coords(topology, coords);
  const std::size_t nv = topology.num_vertices();
  const std::size_t nc = topology.num_cells();
  const int d = topology.dim();

  Preconditioner pc;
  pc.reduced_index.assign(nv, -1);
  bool any_fixed = false;
  for (std::size_t v = 0; v < nv; ++v) {
    if (topology.constraint(v).kind == ConstraintKind::Fixed) {
      any_fixed = true;
    } else {
      pc.reduced_index[v] = static_cast<int>(pc.free_vertices.size());
      pc.free_vertices.push_back(static_cast<int>(v));
    }
  }
  if (!any_fixed)
    throw NoFixedVertices("preconditioner needs at least one fixed vertex; the reduced matrix "
                          "would be singular");
  if (!is_connected(topology))
    throw DisconnectedMesh("preconditioner needs a connected mesh; the reduced matrix would be "
                           "reducible");

  const double inv_nc = 1.0 / static_cast<double>(nc);
  std::vector<Triplet> t;
  t.reserve(nc * (d + 1) * (d + 1));
  const auto add = [&](std::span<const int> cell, const auto& m, double w) {
    const int k = static_cast<int>(cell.size());
    for (int i = 0; i < k; ++i) {
      const int ri = pc.reduced_index[cell[i]];
      if (ri < 0) continue;
      for (int j = 0; j < k; ++j) {
        const int rj = pc.reduced_index[cell[j]];
        if (rj >= 0) t.push_back({ri, rj, w * m(i, j)});
      }
    }
  };
  for (std::size_t c = 0; c < nc; ++c) {
    const auto cell = topology.cell(c);
    if (d == 2) {
      const auto lg = with_cell_index(c, [&] { return triangle_gradient(triangle_at(coords, nv, cell)); });
      add(cell, lg.a, inv_nc);
    } else {
      const Tetrahedron tet = tetrahedron_at(coords, nv, cell);
      const double mu = with_cell_index(c, [&] { return tet_radius_ratio(tet); });
      add(cell, tet_abs_local_matrix(tet), mu * inv_nc);
    }
  }
  const std::size_t n = pc.free_vertices.size();
  pc.p = CsrMatrix::from_triplets(n, n, t);
  return pc;
}

Preconditioner assemble_preconditioner(const SimplexMesh& mesh) {
  return assemble_preconditioner_at(mesh, coordinate_vector(mesh));
}

SpdAudit spd_audit(const CsrMatrix& p) {
  SpdAudit r;
  r.rows = p.rows();
  r.norm = p.frobenius_norm();
  r.symmetry_residual = symmetry_residual(p);
  const double tol = 1e-12 * r.norm;
  r.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double diag = 0.0, off = 0.0;
    for (int k = p.row_ptr()[i]; k < p.row_ptr()[i + 1]; ++k) {
      if (static_cast<std::size_t>(p.col_idx()[k]) == i) diag += p.values()[k];
      else off += std::abs(p.values()[k]);
    }
    const double margin = diag - off;
    r.min_margin = std::min(r.min_margin, margin);
    if (diag < 0.0) ++r.negative_diagonals;
    if (margin >= -tol) ++r.weakly_dominant_rows;
    if (margin > tol) ++r.strictly_dominant_rows;
  }
  if (p.rows() == 0) r.min_margin = 0.0;

  // Breadth-first search over nonzero off-diagonal entries.
  std::vector<bool> seen(p.rows(), false);
  std::vector<std::size_t> queue;
  if (p.rows() > 0) {
    seen[0] = true;
    queue.push_back(0);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t i = queue[head];
    for (int k = p.row_ptr()[i]; k < p.row_ptr()[i + 1]; ++k) {
      const std::size_t j = p.col_idx()[k];
      if (p.values()[k] != 0.0 && !seen[j]) {
        seen[j] = true;
        queue.push_back(j);
      }
    }
  }
  r.connected = queue.size() == p.rows();
  return r;
}

SpdAudit spd_audit(const Preconditioner& p) { return spd_audit(p.p); }

}  // namespace rrmesh
