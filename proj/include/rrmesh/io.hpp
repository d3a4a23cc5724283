#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rrmesh/mesh.hpp"
#include "rrmesh/optimize.hpp"

namespace rrmesh {

enum class MeshFormat { GmshMsh2Ascii, VtkLegacyAscii, NativeText };

/// By extension: .msh, .vtk, .rrm. Throws UnsupportedFormat otherwise.
MeshFormat format_for_path(const std::filesystem::path& path);
const char* format_name(MeshFormat f);

struct LoadedMesh {
  SimplexMesh mesh;
  std::vector<std::string> warnings;
  std::vector<std::size_t> repaired_cells;  // cells whose orientation was flipped
};

/// Parses and validates. MSH keeps only the nodes referenced by imported
/// cells, in file order. Throws ParseError, UnsupportedFormat, EmptyMesh,
/// InvalidMesh or IoError.
LoadedMesh read_msh(std::istream& in);
LoadedMesh read_native(std::istream& in);
LoadedMesh load_mesh(const std::filesystem::path& path);

void write_msh(std::ostream& out, const SimplexMesh& mesh);
/// VTK legacy unstructured grid with the per-cell scalar `quality`.
void write_vtk(std::ostream& out, const SimplexMesh& mesh);
void write_native(std::ostream& out, const SimplexMesh& mesh);
/// Throws IoError when the file cannot be written; VTK output carries quality.
void save_mesh(const SimplexMesh& mesh, const std::filesystem::path& path);
void save_quality_overlay(const SimplexMesh& mesh, const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Header iter,F,grad_norm,lambda,ls_evals and one row per record.
void write_report_csv(std::ostream& out, const SolverReport& report);
void save_report_csv(const SolverReport& report, const std::filesystem::path& path);
/// Human-readable summary of a run.
void write_report_text(std::ostream& out, const OptimizeReport& report);
void write_quality_table(std::ostream& out, const QualityStats& stats);

}  // namespace rrmesh
