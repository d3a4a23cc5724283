#include "rrmesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rrmesh/error.hpp"

namespace rrmesh {
namespace {

// Outward facets of a positively oriented cell, as local vertex indices.
constexpr std::array<std::array<int, 2>, 3> kTriangleFacets = {{{1, 2}, {2, 0}, {0, 1}}};
constexpr std::array<std::array<int, 3>, 4> kTetFacets = {
    {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

struct FacetRecord {
  std::array<int, 3> key;       // sorted vertices, unused slots = -1
  std::array<int, 3> oriented;  // outward ordering
  std::size_t cell;
};

std::vector<FacetRecord> all_facets(const SimplexMesh& mesh) {
  std::vector<FacetRecord> out;
  const int d = mesh.dim();
  out.reserve(mesh.num_cells() * (d + 1));
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    FacetRecord r{{-1, -1, -1}, {-1, -1, -1}, c};
    if (d == 2) {
      for (const auto& f : kTriangleFacets) {
        r.oriented = {cell[f[0]], cell[f[1]], -1};
        r.key = r.oriented;
        std::sort(r.key.begin(), r.key.begin() + 2);
        out.push_back(r);
      }
    } else {
      for (const auto& f : kTetFacets) {
        r.oriented = {cell[f[0]], cell[f[1]], cell[f[2]]};
        r.key = r.oriented;
        std::sort(r.key.begin(), r.key.end());
        out.push_back(r);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const FacetRecord& a, const FacetRecord& b) { return a.key < b.key; });
  return out;
}

Vec3 facet_normal(const SimplexMesh& mesh, const std::array<int, 3>& f) {
  if (mesh.dim() == 2) {
    const auto a = mesh.point(f[0]);
    const auto b = mesh.point(f[1]);
    return Vec3(b[1] - a[1], -(b[0] - a[0]), 0.0);
  }
  const auto p = [&](int v) {
    const auto s = mesh.point(v);
    return Vec3(s[0], s[1], s[2]);
  };
  return (p(f[1]) - p(f[0])).cross(p(f[2]) - p(f[0]));
}

}  // namespace

SimplexMesh::SimplexMesh(int dim, std::vector<double> points, std::vector<int> cells)
    : dim_(dim), points_(std::move(points)), cells_(std::move(cells)) {
  if (dim != 2 && dim != 3) throw InvalidMesh("mesh dimension must be 2 or 3");
  if (points_.size() % dim != 0) throw InvalidMesh("point array length is not a multiple of dim");
  if (cells_.size() % (dim + 1) != 0)
    throw InvalidMesh("cell array length is not a multiple of dim+1");
  constraints_.assign(points_.size() / dim, Constraint::free());
}

void SimplexMesh::set_constraints(std::vector<Constraint> c) {
  if (c.size() != num_vertices()) throw InvalidMesh("constraint count does not match vertices");
  constraints_ = std::move(c);
}

Triangle SimplexMesh::triangle(std::size_t c) const {
  const auto ids = cell(c);
  Triangle t;
  for (int i = 0; i < 3; ++i) {
    const auto p = point(ids[i]);
    t.v[i] = Vec2(p[0], p[1]);
  }
  return t;
}

Tetrahedron SimplexMesh::tetrahedron(std::size_t c) const {
  const auto ids = cell(c);
  Tetrahedron t;
  for (int i = 0; i < 4; ++i) {
    const auto p = point(ids[i]);
    t.v[i] = Vec3(p[0], p[1], p[2]);
  }
  return t;
}

double SimplexMesh::cell_measure(std::size_t c) const {
  return dim_ == 2 ? signed_area(triangle(c)) : signed_volume(tetrahedron(c));
}

std::vector<double> coordinate_vector(const SimplexMesh& mesh) {
  const std::size_t nv = mesh.num_vertices();
  const int d = mesh.dim();
  std::vector<double> v(nv * d);
  for (std::size_t i = 0; i < nv; ++i)
    for (int a = 0; a < d; ++a) v[a * nv + i] = mesh.points()[i * d + a];
  return v;
}

void set_coordinate_vector(SimplexMesh& mesh, std::span<const double> coords) {
  const std::size_t nv = mesh.num_vertices();
  const int d = mesh.dim();
  if (coords.size() != nv * d) throw InvalidMesh("coordinate vector has the wrong length");
  auto& pts = mesh.points();
  for (std::size_t i = 0; i < nv; ++i)
    for (int a = 0; a < d; ++a) pts[i * d + a] = coords[a * nv + i];
}

Triangle triangle_at(std::span<const double> coords, std::size_t nv, std::span<const int> cell) {
  Triangle t;
  for (int i = 0; i < 3; ++i) t.v[i] = Vec2(coords[cell[i]], coords[nv + cell[i]]);
  return t;
}

Tetrahedron tetrahedron_at(std::span<const double> coords, std::size_t nv,
                           std::span<const int> cell) {
  Tetrahedron t;
  for (int i = 0; i < 4; ++i)
    t.v[i] = Vec3(coords[cell[i]], coords[nv + cell[i]], coords[2 * nv + cell[i]]);
  return t;
}

double cell_measure_at(int dim, std::span<const double> coords, std::size_t nv,
                       std::span<const int> cell) {
  return dim == 2 ? signed_area(triangle_at(coords, nv, cell))
                  : signed_volume(tetrahedron_at(coords, nv, cell));
}

std::vector<Violation> validate(const SimplexMesh& mesh) {
  std::vector<Violation> out;
  const std::size_t nv = mesh.num_vertices();
  const int k = mesh.cell_size();
  std::vector<bool> indices_ok(mesh.num_cells(), true);

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    for (int i = 0; i < k; ++i) {
      if (cell[i] < 0 || static_cast<std::size_t>(cell[i]) >= nv) {
        out.push_back({Violation::Rule::IndexOutOfRange, c,
                       "cell " + std::to_string(c) + " references vertex " +
                           std::to_string(cell[i]) + " (have " + std::to_string(nv) + ")"});
        indices_ok[c] = false;
      }
    }
    if (!indices_ok[c]) continue;
    for (int i = 0; i < k && indices_ok[c]; ++i)
      for (int j = i + 1; j < k; ++j)
        if (cell[i] == cell[j]) {
          out.push_back({Violation::Rule::RepeatedVertex, c,
                         "cell " + std::to_string(c) + " repeats vertex " +
                             std::to_string(cell[i])});
          indices_ok[c] = false;
          break;
        }
    if (!indices_ok[c]) continue;

    const double measure = mesh.cell_measure(c);
    const bool valid = mesh.dim() == 2 ? is_valid(mesh.triangle(c)) : is_valid(mesh.tetrahedron(c));
    if (valid) continue;
    const double diam = mesh.dim() == 2 ? diameter(mesh.triangle(c)) : diameter(mesh.tetrahedron(c));
    const double threshold = kDegeneracyFactor * std::pow(diam, mesh.dim());
    if (measure < -threshold) {
      out.push_back({Violation::Rule::NegativeOrientation, c,
                     "cell " + std::to_string(c) + " is negatively oriented"});
    } else {
      out.push_back({Violation::Rule::DegenerateCell, c,
                     "cell " + std::to_string(c) + " is degenerate (measure " +
                         std::to_string(measure) + ")"});
    }
  }

  if (std::all_of(indices_ok.begin(), indices_ok.end(), [](bool b) { return b; })) {
    const auto facets = all_facets(mesh);
    for (std::size_t i = 0; i < facets.size();) {
      std::size_t j = i;
      while (j < facets.size() && facets[j].key == facets[i].key) ++j;
      if (j - i > 2) {
        out.push_back({Violation::Rule::NonManifoldFacet, facets[i].cell,
                       "facet shared by " + std::to_string(j - i) + " cells"});
      }
      i = j;
    }
  }

  for (std::size_t v = 0; v < mesh.constraints().size(); ++v) {
    const Constraint& c = mesh.constraint(v);
    if (c.kind != ConstraintKind::SlidePlane) continue;
    double n2 = 0.0;
    for (int a = 0; a < mesh.dim(); ++a) n2 += c.normal[a] * c.normal[a];
    if (std::abs(n2 - 1.0) > 1e-10) {
      out.push_back({Violation::Rule::BadConstraint, v,
                     "vertex " + std::to_string(v) + " slide normal is not unit length"});
    }
  }
  return out;
}

std::vector<std::size_t> repair_orientation(SimplexMesh& mesh) {
  std::vector<std::size_t> repaired;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell_measure(c) < 0.0) {
      auto cell = mesh.cell(c);
      std::swap(cell[cell.size() - 2], cell[cell.size() - 1]);
      repaired.push_back(c);
    }
  }
  return repaired;
}

std::vector<BoundaryFacet> boundary_facets(const SimplexMesh& mesh) {
  const auto facets = all_facets(mesh);
  std::vector<BoundaryFacet> out;
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i;
    while (j < facets.size() && facets[j].key == facets[i].key) ++j;
    if (j - i == 1) out.push_back({facets[i].oriented, facets[i].cell});
    i = j;
  }
  std::stable_sort(out.begin(), out.end(), [](const BoundaryFacet& a, const BoundaryFacet& b) {
    return a.cell < b.cell;
  });
  return out;
}

std::vector<bool> boundary_vertices(const SimplexMesh& mesh) {
  std::vector<bool> out(mesh.num_vertices(), false);
  for (const auto& f : boundary_facets(mesh))
    for (int i = 0; i < mesh.dim(); ++i) out[f.vertices[i]] = true;
  return out;
}

std::vector<std::vector<int>> vertex_neighbors(const SimplexMesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.num_vertices());
  const int k = mesh.cell_size();
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        if (i != j) adj[cell[i]].push_back(cell[j]);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

std::vector<std::vector<std::size_t>> vertex_cells(const SimplexMesh& mesh) {
  std::vector<std::vector<std::size_t>> out(mesh.num_vertices());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (int v : mesh.cell(c)) out[v].push_back(c);
  return out;
}

bool is_connected(const SimplexMesh& mesh) {
  const std::size_t nv = mesh.num_vertices();
  if (nv == 0) return true;
  DisjointSets sets(nv);
  std::vector<bool> used(nv, false);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    for (int v : cell) used[v] = true;
    for (std::size_t i = 1; i < cell.size(); ++i) sets.unite(cell[0], cell[i]);
  }
  const std::size_t root = sets.find(0);
  for (std::size_t v = 0; v < nv; ++v)
    if (!used[v] || sets.find(v) != root) return false;
  return true;
}

std::vector<Constraint> classify_boundary(const SimplexMesh& mesh, BoundaryPolicy policy) {
  const std::size_t nv = mesh.num_vertices();
  const int d = mesh.dim();
  std::vector<Constraint> out(nv, Constraint::free());
  const auto facets = boundary_facets(mesh);

  if (policy == BoundaryPolicy::FixAll) {
    for (const auto& f : facets)
      for (int i = 0; i < d; ++i) out[f.vertices[i]] = Constraint::fixed();
    return out;
  }

  std::vector<Vec3> normals(facets.size());
  std::vector<double> areas(facets.size());
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const Vec3 n = facet_normal(mesh, facets[i].vertices);
    areas[i] = n.norm();
    normals[i] = n / areas[i];
  }

  // Facets sharing a ridge (an edge in 3D, a vertex in 2D) and bending less
  // than the feature angle belong to the same patch.
  struct Ridge {
    std::array<int, 2> key;
    std::size_t facet;
  };
  std::vector<Ridge> ridges;
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const auto& v = facets[i].vertices;
    if (d == 2) {
      ridges.push_back({{v[0], -1}, i});
      ridges.push_back({{v[1], -1}, i});
    } else {
      for (int r = 0; r < 3; ++r) {
        const int a = v[r], b = v[(r + 1) % 3];
        ridges.push_back({{std::min(a, b), std::max(a, b)}, i});
      }
    }
  }
  std::stable_sort(ridges.begin(), ridges.end(),
                   [](const Ridge& a, const Ridge& b) { return a.key < b.key; });

  const double feature_cos = std::cos(kFeatureAngleDeg * M_PI / 180.0);
  DisjointSets patches(facets.size());
  for (std::size_t i = 0; i < ridges.size();) {
    std::size_t j = i;
    while (j < ridges.size() && ridges[j].key == ridges[i].key) ++j;
    for (std::size_t a = i; a < j; ++a)
      for (std::size_t b = a + 1; b < j; ++b)
        if (normals[ridges[a].facet].dot(normals[ridges[b].facet]) >= feature_cos)
          patches.unite(ridges[a].facet, ridges[b].facet);
    i = j;
  }

  std::vector<Vec3> patch_normal(facets.size(), Vec3::Zero());
  for (std::size_t i = 0; i < facets.size(); ++i)
    patch_normal[patches.find(i)] += areas[i] * normals[i];
  for (auto& n : patch_normal)
    if (n.squaredNorm() > 0.0) n.normalize();

  const double planar_cos = std::cos(kPlanarityToleranceDeg * M_PI / 180.0);
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const double c = normals[i].dot(patch_normal[patches.find(i)]);
    if (c < planar_cos) {
      const double deg = std::acos(std::clamp(c, -1.0, 1.0)) * 180.0 / M_PI;
      throw NonPlanarPatch("boundary facet of cell " + std::to_string(facets[i].cell) +
                           " deviates " + std::to_string(deg) +
                           " degrees from its patch normal");
    }
  }

  // Vertex -> set of patches it touches.
  std::vector<std::vector<std::size_t>> touched(nv);
  for (std::size_t i = 0; i < facets.size(); ++i)
    for (int k = 0; k < d; ++k) touched[facets[i].vertices[k]].push_back(patches.find(i));
  for (std::size_t v = 0; v < nv; ++v) {
    auto& t = touched[v];
    if (t.empty()) continue;
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    if (t.size() == 1) {
      const Vec3& n = patch_normal[t[0]];
      out[v] = Constraint::slide({n.x(), n.y(), d == 3 ? n.z() : 0.0});
    } else {
      out[v] = Constraint::fixed();
    }
  }
  return out;
}

void apply_boundary_policy(SimplexMesh& mesh, BoundaryPolicy policy) {
  mesh.set_constraints(classify_boundary(mesh, policy));
}

}  // namespace rrmesh
