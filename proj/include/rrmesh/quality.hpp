#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rrmesh/mesh.hpp"

namespace rrmesh {

inline constexpr std::size_t kHistogramBins = 20;
inline constexpr double kLowQualityThreshold = 0.3;

/// Quality is q = 1/mu in (0, 1].
struct QualityStats {
  std::size_t num_cells = 0;
  double min_q = 0.0;
  double max_q = 0.0;
  double mean_q = 0.0;
  std::size_t worst_cell = 0;
  std::array<std::size_t, kHistogramBins> histogram{};  // uniform bins over [0, 1]
  std::size_t below_threshold = 0;                      // q < kLowQualityThreshold
};

/// Radius ratio of every cell, using the batched kernels. Throws
/// DegenerateElement naming the first offending cell.
std::vector<double> cell_radius_ratios(const SimplexMesh& mesh);
std::vector<double> cell_radius_ratios(int dim, std::span<const int> cells,
                                       std::span<const double> coords, std::size_t nv);

QualityStats quality_stats(const SimplexMesh& mesh);
QualityStats quality_stats_from_mu(std::span<const double> mu);

}  // namespace rrmesh
