#include "rrmesh/quality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrmesh/error.hpp"
#include "rrmesh/kernels.hpp"

namespace rrmesh {

std::vector<double> cell_radius_ratios(int dim, std::span<const int> cells,
                                       std::span<const double> coords, std::size_t nv) {
  const int k = dim + 1;
  const std::size_t nc = cells.size() / k;
  // Gather to structure-of-arrays: column (local vertex i, axis a).
  const int width = k * dim;
  std::vector<double> soa(static_cast<std::size_t>(width) * nc);
  for (std::size_t c = 0; c < nc; ++c)
    for (int i = 0; i < k; ++i)
      for (int a = 0; a < dim; ++a)
        soa[(i * dim + a) * nc + c] = coords[a * nv + cells[c * k + i]];

  std::vector<double> mu(nc);
  if (dim == 2) {
    kernels::TriangleBatch b;
    for (int j = 0; j < 6; ++j) b.coords[j] = soa.data() + j * nc;
    b.n = nc;
    kernels::tri_radius_ratios(b, mu);
  } else {
    kernels::TetBatch b;
    for (int j = 0; j < 12; ++j) b.coords[j] = soa.data() + j * nc;
    b.n = nc;
    kernels::tet_radius_ratios(b, mu);
  }
  for (std::size_t c = 0; c < nc; ++c)
    if (!std::isfinite(mu[c]))
      throw DegenerateElement("cell " + std::to_string(c) + " is degenerate or inverted", c);
  return mu;
}

std::vector<double> cell_radius_ratios(const SimplexMesh& mesh) {
  return cell_radius_ratios(mesh.dim(), mesh.cells(), coordinate_vector(mesh),
                            mesh.num_vertices());
}

QualityStats quality_stats_from_mu(std::span<const double> mu) {
  if (mu.empty()) throw EmptyMesh("quality statistics need at least one cell");
  QualityStats s;
  s.num_cells = mu.size();
  s.min_q = 1.0 / mu[0];
  s.max_q = s.min_q;
  double sum = 0.0;
  for (std::size_t c = 0; c < mu.size(); ++c) {
    const double q = 1.0 / mu[c];
    if (q < s.min_q) {
      s.min_q = q;
      s.worst_cell = c;
    }
    s.max_q = std::max(s.max_q, q);
    sum += q;
    const auto bin = std::min<std::size_t>(kHistogramBins - 1,
                                           static_cast<std::size_t>(q * kHistogramBins));
    ++s.histogram[bin];
    if (q < kLowQualityThreshold) ++s.below_threshold;
  }
  // Rounding can push the mean a hair outside [min, max].
  s.mean_q = std::clamp(sum / static_cast<double>(mu.size()), s.min_q, s.max_q);
  return s;
}

QualityStats quality_stats(const SimplexMesh& mesh) {
  return quality_stats_from_mu(cell_radius_ratios(mesh));
}

}  // namespace rrmesh
