#include "rrmesh/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "rrmesh/error.hpp"
#include "rrmesh/quality.hpp"

namespace rrmesh {
namespace {

constexpr int kMshTriangle = 2;
constexpr int kMshTetrahedron = 4;

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-blank line, split on whitespace; false at end of input.
  bool next(std::vector<std::string_view>& tokens) {
    while (std::getline(in_, text_)) {
      ++line_;
      if (!text_.empty() && text_.back() == '\r') text_.pop_back();
      tokens.clear();
      std::string_view s = text_;
      while (true) {
        const auto b = s.find_first_not_of(" \t");
        if (b == std::string_view::npos) break;
        s.remove_prefix(b);
        const auto e = std::min(s.find_first_of(" \t"), s.size());
        tokens.push_back(s.substr(0, e));
        s.remove_prefix(e);
      }
      if (!tokens.empty()) return true;
    }
    return false;
  }
  void expect_next(std::vector<std::string_view>& tokens, const char* what) {
    if (!next(tokens)) throw ParseError(std::string("unexpected end of file, expected ") + what, line_ + 1);
  }
  std::size_t line() const { return line_; }

  template <class T>
  T number(std::string_view tok, const char* what) const {
    T v{};
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size())
      throw ParseError(std::string("bad ") + what + " '" + std::string(tok) + "'", line_);
    return v;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

 private:
  std::istream& in_;
  std::string text_;
  std::size_t line_ = 0;
};

void finish(LoadedMesh& out) {
  if (out.mesh.num_cells() == 0) throw EmptyMesh("mesh file contains no cells");
  out.repaired_cells = repair_orientation(out.mesh);
  for (std::size_t c : out.repaired_cells)
    out.warnings.push_back("cell " + std::to_string(c) + ": orientation repaired");
  const auto violations = validate(out.mesh);
  if (!violations.empty()) throw InvalidMesh(violations.front().message);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  return f;
}

void check_written(std::ofstream& f, const std::filesystem::path& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

MeshFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".msh") return MeshFormat::GmshMsh2Ascii;
  if (ext == ".vtk") return MeshFormat::VtkLegacyAscii;
  if (ext == ".rrm") return MeshFormat::NativeText;
  throw UnsupportedFormat("unknown mesh extension '" + ext + "' (expected .msh, .vtk or .rrm)");
}

const char* format_name(MeshFormat f) {
  switch (f) {
    case MeshFormat::GmshMsh2Ascii: return "Gmsh MSH 2.2 ASCII";
    case MeshFormat::VtkLegacyAscii: return "VTK legacy ASCII";
    case MeshFormat::NativeText: return "native text";
  }
  return "?";
}

LoadedMesh read_msh(std::istream& in) {
  LineReader r(in);
  std::vector<std::string_view> t;
  if (!r.next(t) || t[0] != "$MeshFormat") throw UnsupportedFormat("not a Gmsh MSH file (no $MeshFormat)");
  r.expect_next(t, "format line");
  if (t.size() < 3) r.fail("format line needs version, file type and data size");
  if (t[0].substr(0, 2) != "2.") throw UnsupportedFormat("MSH version " + std::string(t[0]) + " (only 2.2 is supported)");
  if (t[1] != "0") throw UnsupportedFormat("binary MSH is not supported");
  r.expect_next(t, "$EndMeshFormat");
  if (t[0] != "$EndMeshFormat") r.fail("expected $EndMeshFormat");

  std::vector<std::size_t> node_tags;
  std::vector<std::array<double, 3>> node_xyz;
  std::unordered_map<std::size_t, std::size_t> node_index;
  std::vector<std::vector<std::size_t>> tris, tets;  // node tags
  std::map<int, std::size_t> ignored;
  bool have_nodes = false, have_elements = false;

  while (r.next(t)) {
    if (t[0] == "$Nodes") {
      if (have_nodes) r.fail("duplicate $Nodes section");
      have_nodes = true;
      r.expect_next(t, "node count");
      const auto n = r.number<std::size_t>(t[0], "node count");
      for (std::size_t i = 0; i < n; ++i) {
        r.expect_next(t, "node line");
        if (t[0] == "$EndNodes") r.fail("$Nodes ended after " + std::to_string(i) + " of " + std::to_string(n) + " nodes");
        if (t.size() != 4) r.fail("node line needs tag x y z");
        const auto tag = r.number<std::size_t>(t[0], "node tag");
        if (!node_index.emplace(tag, node_tags.size()).second) r.fail("duplicate node tag " + std::to_string(tag));
        node_tags.push_back(tag);
        node_xyz.push_back({r.number<double>(t[1], "coordinate"), r.number<double>(t[2], "coordinate"),
                            r.number<double>(t[3], "coordinate")});
      }
      r.expect_next(t, "$EndNodes");
      if (t[0] != "$EndNodes") r.fail("expected $EndNodes");
    } else if (t[0] == "$Elements") {
      if (have_elements) r.fail("duplicate $Elements section");
      have_elements = true;
      r.expect_next(t, "element count");
      const auto n = r.number<std::size_t>(t[0], "element count");
      for (std::size_t i = 0; i < n; ++i) {
        r.expect_next(t, "element line");
        if (t[0] == "$EndElements") r.fail("$Elements ended after " + std::to_string(i) + " of " + std::to_string(n) + " elements");
        if (t.size() < 3) r.fail("element line needs id, type and tag count");
        const int type = r.number<int>(t[1], "element type");
        const auto ntags = r.number<std::size_t>(t[2], "tag count");
        if (t.size() < 3 + ntags) r.fail("element line shorter than its tag count");
        const std::size_t nn = t.size() - 3 - ntags;
        if (type != kMshTriangle && type != kMshTetrahedron) {
          ++ignored[type];
          continue;
        }
        const std::size_t want = type == kMshTriangle ? 3 : 4;
        if (nn != want) r.fail("element type " + std::to_string(type) + " needs " + std::to_string(want) + " nodes");
        std::vector<std::size_t> nodes(want);
        for (std::size_t k = 0; k < want; ++k) {
          nodes[k] = r.number<std::size_t>(t[3 + ntags + k], "node tag");
          if (!node_index.count(nodes[k])) r.fail("element references unknown node " + std::to_string(nodes[k]));
        }
        (type == kMshTriangle ? tris : tets).push_back(std::move(nodes));
      }
      r.expect_next(t, "$EndElements");
      if (t[0] != "$EndElements") r.fail("expected $EndElements");
    } else if (t[0].size() > 1 && t[0][0] == '$') {
      const std::string end = "$End" + std::string(t[0].substr(1));
      bool closed = false;
      while (r.next(t))
        if (t[0] == end) {
          closed = true;
          break;
        }
      if (!closed) r.fail("section missing " + end);
    } else {
      r.fail("unexpected text outside a section");
    }
  }

  LoadedMesh out;
  for (const auto& [type, count] : ignored)
    out.warnings.push_back("ignored " + std::to_string(count) + " element(s) of unsupported type " + std::to_string(type));
  if (!have_elements || (tris.empty() && tets.empty())) throw EmptyMesh("MSH file contains no triangles or tetrahedra");

  const int dim = tets.empty() ? 2 : 3;
  const auto& cells = dim == 3 ? tets : tris;
  if (dim == 3 && !tris.empty())
    out.warnings.push_back("ignored " + std::to_string(tris.size()) + " triangle(s) in a tetrahedral mesh");

  // Keep referenced nodes in file order.
  std::vector<int> used(node_tags.size(), -1);
  for (const auto& c : cells)
    for (std::size_t tag : c) used[node_index.at(tag)] = 0;
  std::vector<double> points;
  int next = 0;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < node_tags.size(); ++i) {
    if (used[i] < 0) {
      ++dropped;
      continue;
    }
    used[i] = next++;
    if (dim == 2 && node_xyz[i][2] != 0.0)
      throw UnsupportedFormat("triangle mesh with nonzero z at node " + std::to_string(node_tags[i]) +
                              " (surface meshes are not supported)");
    for (int a = 0; a < dim; ++a) points.push_back(node_xyz[i][a]);
  }
  if (dropped) out.warnings.push_back("dropped " + std::to_string(dropped) + " unreferenced node(s)");
  std::vector<int> conn;
  conn.reserve(cells.size() * (dim + 1));
  for (const auto& c : cells)
    for (std::size_t tag : c) conn.push_back(used[node_index.at(tag)]);
  out.mesh = SimplexMesh(dim, std::move(points), std::move(conn));
  finish(out);
  return out;
}

LoadedMesh read_native(std::istream& in) {
  LineReader r(in);
  std::vector<std::string_view> t;
  if (!r.next(t) || t.size() != 2 || t[0] != "rrmesh-native" || t[1] != "1")
    throw UnsupportedFormat("not a native mesh file (expected 'rrmesh-native 1')");
  const auto header = [&](const char* key) {
    r.expect_next(t, key);
    if (t.size() != 2 || t[0] != key) r.fail(std::string("expected '") + key + " <count>'");
    return r.number<std::size_t>(t[1], key);
  };
  const auto dim = header("dim");
  if (dim != 2 && dim != 3) r.fail("dim must be 2 or 3");
  const auto nv = header("nv");
  const auto nc = header("nc");
  std::vector<double> points;
  points.reserve(nv * dim);
  for (std::size_t i = 0; i < nv; ++i) {
    r.expect_next(t, "vertex line");
    if (t.size() != dim) r.fail("vertex line needs " + std::to_string(dim) + " coordinates");
    for (auto tok : t) points.push_back(r.number<double>(tok, "coordinate"));
  }
  std::vector<int> cells;
  cells.reserve(nc * (dim + 1));
  for (std::size_t i = 0; i < nc; ++i) {
    r.expect_next(t, "cell line");
    if (t.size() != dim + 1) r.fail("cell line needs " + std::to_string(dim + 1) + " indices");
    for (auto tok : t) cells.push_back(r.number<int>(tok, "vertex index"));
  }
  std::vector<Constraint> cons(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    r.expect_next(t, "constraint line");
    if (t[0] == "free" && t.size() == 1) {
      cons[i] = Constraint::free();
    } else if (t[0] == "fixed" && t.size() == 1) {
      cons[i] = Constraint::fixed();
    } else if (t[0] == "slide" && t.size() == dim + 1) {
      std::array<double, 3> n{0.0, 0.0, 0.0};
      for (std::size_t a = 0; a < dim; ++a) n[a] = r.number<double>(t[1 + a], "normal component");
      cons[i] = Constraint::slide(n);
    } else {
      r.fail("constraint must be 'free', 'fixed' or 'slide' followed by " + std::to_string(dim) + " components");
    }
  }
  if (r.next(t)) r.fail("trailing content after constraints");
  LoadedMesh out;
  out.mesh = SimplexMesh(static_cast<int>(dim), std::move(points), std::move(cells));
  out.mesh.set_constraints(std::move(cons));
  finish(out);
  return out;
}

LoadedMesh load_mesh(const std::filesystem::path& path) {
  const MeshFormat f = format_for_path(path);
  if (f == MeshFormat::VtkLegacyAscii) throw UnsupportedFormat("VTK files are output only");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return f == MeshFormat::GmshMsh2Ascii ? read_msh(in) : read_native(in);
}

void write_msh(std::ostream& out, const SimplexMesh& mesh) {
  const int d = mesh.dim();
  char buf[96];
  out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << mesh.num_vertices() << '\n';
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const auto p = mesh.point(v);
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %.17g\n", v + 1, p[0], p[1], d == 3 ? p[2] : 0.0);
    out << buf;
  }
  out << "$EndNodes\n$Elements\n" << mesh.num_cells() << '\n';
  const int type = d == 2 ? kMshTriangle : kMshTetrahedron;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    out << c + 1 << ' ' << type << " 2 0 1";
    for (int v : mesh.cell(c)) out << ' ' << v + 1;
    out << '\n';
  }
  out << "$EndElements\n";
}

void write_vtk(std::ostream& out, const SimplexMesh& mesh) {
  const auto mu = cell_radius_ratios(mesh);
  const int d = mesh.dim();
  const std::size_t nc = mesh.num_cells();
  char buf[96];
  out << "# vtk DataFile Version 3.0\nradius-ratio mesh quality\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const auto p = mesh.point(v);
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p[0], p[1], d == 3 ? p[2] : 0.0);
    out << buf;
  }
  out << "CELLS " << nc << ' ' << nc * (d + 2) << '\n';
  for (std::size_t c = 0; c < nc; ++c) {
    out << d + 1;
    for (int v : mesh.cell(c)) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) out << (d == 2 ? 5 : 10) << '\n';
  out << "CELL_DATA " << nc << "\nSCALARS quality double 1\nLOOKUP_TABLE default\n";
  for (double m : mu) {
    std::snprintf(buf, sizeof buf, "%.17g\n", 1.0 / m);
    out << buf;
  }
}

void write_native(std::ostream& out, const SimplexMesh& mesh) {
  const int d = mesh.dim();
  out << "rrmesh-native 1\ndim " << d << "\nnv " << mesh.num_vertices() << "\nnc " << mesh.num_cells() << '\n';
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const auto p = mesh.point(v);
    for (int a = 0; a < d; ++a) out << (a ? " " : "") << format_double(p[a]);
    out << '\n';
  }
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto cell = mesh.cell(c);
    for (std::size_t k = 0; k < cell.size(); ++k) out << (k ? " " : "") << cell[k];
    out << '\n';
  }
  for (const Constraint& c : mesh.constraints()) {
    switch (c.kind) {
      case ConstraintKind::Free: out << "free\n"; break;
      case ConstraintKind::Fixed: out << "fixed\n"; break;
      case ConstraintKind::SlidePlane:
        out << "slide";
        for (int a = 0; a < d; ++a) out << ' ' << format_double(c.normal[a]);
        out << '\n';
        break;
    }
  }
}

void save_mesh(const SimplexMesh& mesh, const std::filesystem::path& path) {
  const MeshFormat f = format_for_path(path);
  auto out = open_for_write(path);
  switch (f) {
    case MeshFormat::GmshMsh2Ascii: write_msh(out, mesh); break;
    case MeshFormat::VtkLegacyAscii: write_vtk(out, mesh); break;
    case MeshFormat::NativeText: write_native(out, mesh); break;
  }
  check_written(out, path);
}

void save_quality_overlay(const SimplexMesh& mesh, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_vtk(out, mesh);
  check_written(out, path);
}

void write_report_csv(std::ostream& out, const SolverReport& report) {
  out << "iter,F,grad_norm,lambda,ls_evals\n";
  char buf[128];
  for (const auto& r : report.records) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%d\n", r.iter, r.energy, r.grad_norm, r.step, r.ls_evals);
    out << buf;
  }
}

void save_report_csv(const SolverReport& report, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_report_csv(out, report);
  check_written(out, path);
}

void write_quality_table(std::ostream& out, const QualityStats& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf,
                "cells      %zu\nmin q      %.6f  (cell %zu)\nmean q     %.6f\nmax q      %.6f\nq < %.1f    %zu\n",
                s.num_cells, s.min_q, s.worst_cell, s.mean_q, s.max_q, kLowQualityThreshold, s.below_threshold);
  out << buf << "histogram\n";
  const double w = 1.0 / kHistogramBins;
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    std::snprintf(buf, sizeof buf, "  [%.2f, %.2f%c  %zu\n", b * w, (b + 1) * w, b + 1 == kHistogramBins ? ']' : ')',
                  s.histogram[b]);
    out << buf;
  }
}

void write_report_text(std::ostream& out, const OptimizeReport& report) {
  const SolverReport& s = report.solver;
  char buf[160];
  std::snprintf(buf, sizeof buf, "method        %s\niterations    %d\nevaluations   %d\n", method_name(report.method),
                s.iterations(), s.evaluations);
  out << buf;
  if (is_preconditioned(report.method)) {
    std::snprintf(buf, sizeof buf, "precond       %d builds, %ld CG iterations\n", s.preconditioner_updates,
                  report.cg_iterations);
    out << buf;
  }
  out << "termination   " << termination_name(s.reason);
  if (!s.message.empty()) out << " (" << s.message << ')';
  out << '\n';
  if (!s.records.empty()) {
    std::snprintf(buf, sizeof buf, "energy        %.12g -> %.12g\ngrad norm     %.6g -> %.6g\n", s.records.front().energy,
                  s.records.back().energy, s.records.front().grad_norm, s.records.back().grad_norm);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "min q         %.6f", report.before.min_q);
  out << buf;
  if (report.after) {
    std::snprintf(buf, sizeof buf, " -> %.6f", report.after->min_q);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "\nmean q        %.6f", report.before.mean_q);
  out << buf;
  if (report.after) {
    std::snprintf(buf, sizeof buf, " -> %.6f", report.after->mean_q);
    out << buf;
  }
  out << "\nq < 0.3       " << report.before.below_threshold;
  if (report.after) out << " -> " << report.after->below_threshold;
  out << '\n';
}

}  // namespace rrmesh
