#include "rrmesh/generate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "rrmesh/error.hpp"

namespace rrmesh {
namespace {

bool cell_ok(const SimplexMesh& mesh, std::size_t c) {
  return mesh.dim() == 2 ? is_valid(mesh.triangle(c)) : is_valid(mesh.tetrahedron(c));
}

bool star_ok(const SimplexMesh& mesh, const std::vector<std::size_t>& cells) {
  return std::all_of(cells.begin(), cells.end(), [&](std::size_t c) { return cell_ok(mesh, c); });
}

double shortest_incident_edge(const SimplexMesh& mesh, int v, const std::vector<int>& nbrs) {
  double best = std::numeric_limits<double>::infinity();
  const auto p = mesh.point(v);
  for (int w : nbrs) {
    const auto q = mesh.point(w);
    double d2 = 0.0;
    for (int a = 0; a < mesh.dim(); ++a) d2 += (p[a] - q[a]) * (p[a] - q[a]);
    best = std::min(best, std::sqrt(d2));
  }
  return best;
}

// Uniform double in [0, 1) from the top 53 bits, independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

SimplexMesh equilateral(int n) {
  const double h = std::sqrt(3.0) / 2.0;
  std::vector<double> pts;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      pts.push_back(i + 0.5 * j);
      pts.push_back(h * j);
    }
  const auto id = [n](int i, int j) { return i + (n + 1) * j; };
  std::vector<int> cells;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      cells.insert(cells.end(), {id(i, j), id(i + 1, j), id(i, j + 1)});
      cells.insert(cells.end(), {id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return SimplexMesh(2, std::move(pts), std::move(cells));
}

SimplexMesh square(int n) {
  std::vector<double> pts;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      pts.push_back(static_cast<double>(i) / n);
      pts.push_back(static_cast<double>(j) / n);
    }
  const auto id = [n](int i, int j) { return i + (n + 1) * j; };
  std::vector<int> cells;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      cells.insert(cells.end(), {id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      cells.insert(cells.end(), {id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return SimplexMesh(2, std::move(pts), std::move(cells));
}

SimplexMesh cube(int n) {
  std::vector<double> pts;
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        pts.push_back(static_cast<double>(i) / n);
        pts.push_back(static_cast<double>(j) / n);
        pts.push_back(static_cast<double>(k) / n);
      }
  const auto id = [n](int i, int j, int k) { return i + (n + 1) * (j + (n + 1) * k); };
  std::vector<int> cells;
  std::array<int, 3> perm = {0, 1, 2};
  std::vector<std::array<int, 3>> perms;
  do perms.push_back(perm);
  while (std::next_permutation(perm.begin(), perm.end()));

  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> at = {i, j, k};
          std::array<int, 4> tet{};
          tet[0] = id(at[0], at[1], at[2]);
          for (int s = 0; s < 2; ++s) {
            ++at[p[s]];
            tet[s + 1] = id(at[0], at[1], at[2]);
          }
          tet[3] = id(i + 1, j + 1, k + 1);
          cells.insert(cells.end(), tet.begin(), tet.end());
        }
  SimplexMesh mesh(3, std::move(pts), std::move(cells));
  repair_orientation(mesh);
  return mesh;
}

SimplexMesh displace(const SimplexMesh& mesh, const VertexDisplace& spec) {
  SimplexMesh out = mesh;
  for (const auto& m : spec.moves) {
    if (m.vertex < 0 || static_cast<std::size_t>(m.vertex) >= mesh.num_vertices())
      throw InvalidSpec("displaced vertex " + std::to_string(m.vertex) + " out of range");
    auto p = out.point(m.vertex);
    for (int a = 0; a < mesh.dim(); ++a) p[a] += m.offset[a];
  }
  for (std::size_t c = 0; c < out.num_cells(); ++c)
    if (!cell_ok(out, c))
      throw WouldInvert("displacement inverts or collapses cell " + std::to_string(c));
  return out;
}

SimplexMesh jitter(const SimplexMesh& mesh, const RandomJitter& spec) {
  if (!(spec.amplitude >= 0.0)) throw InvalidSpec("jitter amplitude must be non-negative");
  SimplexMesh out = mesh;
  if (spec.amplitude == 0.0) return out;
  std::mt19937_64 gen(spec.seed);
  const auto boundary = boundary_vertices(mesh);
  const auto nbrs = vertex_neighbors(mesh);
  const auto star = vertex_cells(mesh);
  const int d = mesh.dim();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    std::array<double, 3> offset{};
    for (int a = 0; a < d; ++a) offset[a] = 2.0 * unit_uniform(gen) - 1.0;
    if (boundary[v] || star[v].empty()) continue;
    const double scale = spec.amplitude * shortest_incident_edge(out, static_cast<int>(v), nbrs[v]);
    std::array<double, 3> origin{};
    for (int a = 0; a < d; ++a) origin[a] = out.point(v)[a];
    double factor = scale;
    for (int attempt = 0; attempt < 30; ++attempt, factor *= 0.5) {
      for (int a = 0; a < d; ++a) out.point(v)[a] = origin[a] + factor * offset[a];
      if (star_ok(out, star[v])) break;
      for (int a = 0; a < d; ++a) out.point(v)[a] = origin[a];
    }
  }
  return out;
}

}  // namespace

SimplexMesh gen_mesh(const GeneratorSpec& spec) {
  if (spec.n < 1) throw InvalidSpec("generator size must be >= 1, got " + std::to_string(spec.n));
  switch (spec.kind) {
    case GeneratorKind::Equilateral: return equilateral(spec.n);
    case GeneratorKind::Square: return square(spec.n);
    case GeneratorKind::Cube: return cube(spec.n);
  }
  throw InvalidSpec("unknown generator kind");
}

SimplexMesh refine_uniform(const SimplexMesh& mesh) {
  if (mesh.dim() != 2) throw InvalidSpec("uniform refinement is implemented for triangles only");
  std::vector<double> pts = mesh.points();
  std::map<std::pair<int, int>, int> midpoint;
  const auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    const auto [it, inserted] = midpoint.try_emplace({key.first, key.second}, 0);
    if (inserted) {
      it->second = static_cast<int>(pts.size() / 2);
      for (int k = 0; k < 2; ++k) pts.push_back(0.5 * (pts[2 * a + k] + pts[2 * b + k]));
    }
    return it->second;
  };
  std::vector<int> cells;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto t = mesh.cell(c);
    const int m01 = mid(t[0], t[1]), m12 = mid(t[1], t[2]), m20 = mid(t[2], t[0]);
    cells.insert(cells.end(), {t[0], m01, m20, m01, t[1], m12, m20, m12, t[2], m01, m12, m20});
  }
  return SimplexMesh(2, std::move(pts), std::move(cells));
}

SimplexMesh plant_slivers(const SimplexMesh& mesh, const PlantSliver& spec,
                          std::vector<std::size_t>* planted_cells) {
  if (mesh.dim() != 3) throw InvalidSpec("sliver planting needs a tetrahedral mesh");
  if (spec.count < 0) throw InvalidSpec("sliver count must be non-negative");
  if (!(spec.eps > 0.0 && spec.eps < 1.0)) throw InvalidSpec("sliver eps must be in (0, 1)");

  SimplexMesh out = mesh;
  const auto boundary = boundary_vertices(mesh);
  const auto star = vertex_cells(mesh);
  std::vector<std::size_t> candidates;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    if (std::none_of(cell.begin(), cell.end(), [&](int v) { return boundary[v]; }))
      candidates.push_back(c);
  }

  // Vertices whose stars already contain a planted sliver are off limits.
  std::vector<bool> blocked(mesh.num_vertices(), false);
  std::vector<std::size_t> planted;
  const std::size_t want = static_cast<std::size_t>(spec.count);
  const std::size_t stride = want ? std::max<std::size_t>(1, candidates.size() / want) : 1;

  // Strided visiting order so the slivers spread through the mesh.
  std::vector<std::size_t> order;
  for (std::size_t r = 0; r < stride; ++r)
    for (std::size_t i = (stride / 2 + r) % stride; i < candidates.size(); i += stride)
      order.push_back(candidates[i]);

  for (std::size_t c : order) {
    if (planted.size() == want) break;
    const auto cell = out.cell(c);
    if (std::any_of(cell.begin(), cell.end(), [&](int v) { return blocked[v]; })) continue;

    const Tetrahedron t = out.tetrahedron(c);
    double mean_edge = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) mean_edge += (t.v[i] - t.v[j]).norm() / 6.0;

    for (int local = 0; local < 4; ++local) {
      const int v = cell[local];
      // Opposite face, its unit normal and centroid.
      std::array<Vec3, 3> f;
      for (int k = 0, m = 0; k < 4; ++k)
        if (k != local) f[m++] = t.v[k];
      const Vec3 centroid = (f[0] + f[1] + f[2]) / 3.0;
      const Vec3 n = (f[1] - f[0]).cross(f[2] - f[0]).normalized();
      const double height = std::abs((t.v[local] - f[0]).dot(n));
      const double target = spec.eps * mean_edge;
      if (height <= target) continue;
      // Slide along the segment towards the face centroid until the height is reached.
      const Vec3 p = t.v[local] + (1.0 - target / height) * (centroid - t.v[local]);

      const Vec3 origin = t.v[local];
      for (int a = 0; a < 3; ++a) out.point(v)[a] = p[a];
      if (star_ok(out, star[v])) {
        planted.push_back(c);
        for (std::size_t sc : star[v])
          for (int w : out.cell(sc)) blocked[w] = true;
        break;
      }
      for (int a = 0; a < 3; ++a) out.point(v)[a] = origin[a];
    }
  }
  if (planted.size() < want)
    throw InvalidSpec("could only plant " + std::to_string(planted.size()) + " of " +
                      std::to_string(want) + " slivers");
  if (planted_cells) *planted_cells = planted;
  return out;
}

SimplexMesh perturb_mesh(const SimplexMesh& mesh, const PerturbMode& mode) {
  return std::visit(
      [&](const auto& m) -> SimplexMesh {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, VertexDisplace>) return displace(mesh, m);
        else if constexpr (std::is_same_v<T, RandomJitter>) return jitter(mesh, m);
        else return plant_slivers(mesh, m, nullptr);
      },
      mode);
}

}  // namespace rrmesh
