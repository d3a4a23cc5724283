#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rrmesh/error.hpp"
#include "rrmesh/generate.hpp"
#include "rrmesh/io.hpp"
#include "support.hpp"

using namespace rrmesh;

namespace {

const char* kHeader = "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

LoadedMesh parse_msh(const std::string& text) {
  std::istringstream in(text);
  return read_msh(in);
}

std::string to_native(const SimplexMesh& m) {
  std::ostringstream os;
  write_native(os, m);
  return os.str();
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rrmesh_test_io";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("minimal triangle file") {
  const auto l = parse_msh(std::string(kHeader) +
                           "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
                           "$Elements\n1\n1 2 2 0 1 1 2 3\n$EndElements\n");
  CHECK(l.mesh.dim() == 2);
  CHECK(l.mesh.num_vertices() == 3);
  CHECK(l.mesh.num_cells() == 1);
  CHECK(l.warnings.empty());
  CHECK(l.repaired_cells.empty());
}

TEST_CASE("inverted tetrahedron is repaired and reported") {
  const auto l = parse_msh(std::string(kHeader) +
                           "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
                           "$Elements\n1\n1 4 2 0 1 1 3 2 4\n$EndElements\n");
  REQUIRE(l.mesh.dim() == 3);
  CHECK(l.repaired_cells == std::vector<std::size_t>{0});
  CHECK(l.warnings.size() == 1);
  CHECK(l.mesh.cell_measure(0) == doctest::Approx(1.0 / 6));
}

TEST_CASE("unsupported element types and unknown sections are skipped with warnings") {
  const auto l = parse_msh(std::string(kHeader) +
                           "$PhysicalNames\n1\n2 1 \"domain\"\n$EndPhysicalNames\n"
                           "$Nodes\n5\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 1 1 0\n9 7 7 0\n$EndNodes\n"
                           "$Elements\n4\n1 15 2 0 1 1\n2 1 2 0 1 1 2\n3 2 2 0 1 1 2 3\n4 2 2 0 1 2 4 3\n$EndElements\n");
  CHECK(l.mesh.num_cells() == 2);
  CHECK(l.mesh.num_vertices() == 4);  // node 9 is unreferenced
  CHECK(l.warnings.size() == 3);
}

TEST_CASE("tetrahedra take precedence over triangles") {
  const auto l = parse_msh(std::string(kHeader) +
                           "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 0 1 0\n4 0 0 1\n$EndNodes\n"
                           "$Elements\n2\n1 2 2 0 1 1 2 3\n2 4 2 0 1 1 2 3 4\n$EndElements\n");
  CHECK(l.mesh.dim() == 3);
  CHECK(l.mesh.num_cells() == 1);
  CHECK(l.warnings.size() == 1);
}

TEST_CASE("malformed files") {
  SUBCASE("truncated node section names its line") {
    try {
      parse_msh(std::string(kHeader) + "$Nodes\n3\n1 0 0 0\n2 1 0 0\n$EndNodes\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 8);
      CHECK(std::string(e.what()).find("line 8") != std::string::npos);
    }
  }
  SUBCASE("file ending inside a section") {
    CHECK_THROWS_AS(parse_msh(std::string(kHeader) + "$Nodes\n3\n1 0 0 0\n"), ParseError);
  }
  SUBCASE("bad number") {
    CHECK_THROWS_AS(parse_msh(std::string(kHeader) + "$Nodes\n1\n1 0 zero 0\n$EndNodes\n"), ParseError);
  }
  SUBCASE("unknown node reference") {
    CHECK_THROWS_AS(parse_msh(std::string(kHeader) + "$Nodes\n1\n1 0 0 0\n$EndNodes\n"
                                                     "$Elements\n1\n1 2 2 0 1 1 2 3\n$EndElements\n"),
                    ParseError);
  }
  SUBCASE("other versions and binary") {
    CHECK_THROWS_AS(parse_msh("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n"), UnsupportedFormat);
    CHECK_THROWS_AS(parse_msh("$MeshFormat\n2.2 1 8\n$EndMeshFormat\n"), UnsupportedFormat);
    CHECK_THROWS_AS(parse_msh("hello\n"), UnsupportedFormat);
  }
  SUBCASE("no cells") {
    CHECK_THROWS_AS(parse_msh(std::string(kHeader) + "$Nodes\n1\n1 0 0 0\n$EndNodes\n"), EmptyMesh);
    CHECK_THROWS_AS(parse_msh(std::string(kHeader) + "$Nodes\n2\n1 0 0 0\n2 1 0 0\n$EndNodes\n"
                                                     "$Elements\n1\n1 1 2 0 1 1 2\n$EndElements\n"),
                    EmptyMesh);
  }
  SUBCASE("surface triangles") {
    CHECK_THROWS_AS(parse_msh(std::string(kHeader) + "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 1\n$EndNodes\n"
                                                     "$Elements\n1\n1 2 2 0 1 1 2 3\n$EndElements\n"),
                    UnsupportedFormat);
  }
  SUBCASE("degenerate cell") {
    CHECK_THROWS_AS(parse_msh(std::string(kHeader) + "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 2 0 0\n$EndNodes\n"
                                                     "$Elements\n1\n1 2 2 0 1 1 2 3\n$EndElements\n"),
                    InvalidMesh);
  }
}

TEST_CASE("quality overlay") {
  const auto sq = gen_mesh({GeneratorKind::Square, 1});
  REQUIRE(sq.num_cells() == 2);
  std::ostringstream os;
  write_vtk(os, sq);
  const auto lines = lines_of(os.str());
  std::size_t at = 0;
  while (at < lines.size() && lines[at] != "CELL_DATA 2") ++at;
  REQUIRE(at + 4 < lines.size() + 1);
  CHECK(lines[at + 1] == "SCALARS quality double 1");
  const double expected = 2.0 * (std::sqrt(2.0) - 1.0);  // right isosceles triangle
  for (int c = 0; c < 2; ++c) {
    const double q = std::stod(lines[at + 3 + c]);
    CHECK(q == doctest::Approx(expected).epsilon(1e-12));
    CHECK(q == doctest::Approx(1.0 / test_support::oracle_triangle_mu(sq.triangle(c))).epsilon(1e-12));
  }
  CHECK(os.str().rfind("# vtk DataFile Version 3.0\n", 0) == 0);
  CHECK(os.str().find("CELL_TYPES 2\n5\n5\n") != std::string::npos);
}

TEST_CASE("native round trip is byte exact") {
  for (auto policy : {BoundaryPolicy::FixAll, BoundaryPolicy::SlidePlanar}) {
    for (auto base : {gen_mesh({GeneratorKind::Square, 4}), gen_mesh({GeneratorKind::Cube, 2})}) {
      auto m = perturb_mesh(base, RandomJitter{0.3, 17});
      apply_boundary_policy(m, policy);
      const std::string first = to_native(m);
      std::istringstream in(first);
      const auto back = read_native(in);
      CHECK(back.mesh.points() == m.points());
      CHECK(back.mesh.constraints() == m.constraints());
      CHECK(to_native(back.mesh) == first);
    }
  }
  std::istringstream trailing("rrmesh-native 1\ndim 2\nnv 3\nnc 1\n0 0\n1 0\n0 1\n0 1 2\nfree\nfree\nfixed\nextra\n");
  CHECK_THROWS_AS(read_native(trailing), ParseError);
}

TEST_CASE("msh round trip keeps every digit") {
  for (auto base : {gen_mesh({GeneratorKind::Equilateral, 5}), gen_mesh({GeneratorKind::Cube, 3})}) {
    const auto m = perturb_mesh(base, RandomJitter{0.3, 18});
    std::ostringstream os;
    write_msh(os, m);
    const auto back = parse_msh(os.str());
    CHECK(back.warnings.empty());
    CHECK(back.mesh.points() == m.points());
    CHECK(back.mesh.cells() == m.cells());
  }
}

TEST_CASE("files on disk") {
  const auto m = gen_mesh({GeneratorKind::Cube, 2});
  for (const char* ext : {".msh", ".rrm"}) {
    const auto p = scratch(std::string("cube") + ext);
    save_mesh(m, p);
    CHECK(load_mesh(p).mesh.points() == m.points());
  }
  const auto vtk = scratch("cube.vtk");
  save_mesh(m, vtk);
  CHECK(std::filesystem::file_size(vtk) > 0);
  CHECK_THROWS_AS(load_mesh(vtk), UnsupportedFormat);
  CHECK_THROWS_AS(save_mesh(m, scratch("cube.obj")), UnsupportedFormat);
  CHECK_THROWS_AS(load_mesh(scratch("missing.msh")), IoError);
  CHECK_THROWS_AS(save_mesh(m, "/nonexistent-dir/cube.msh"), IoError);
  CHECK(format_for_path("a/b.MSH") == MeshFormat::GmshMsh2Ascii);
}

TEST_CASE("report csv") {
  SolverReport rep;
  rep.records.push_back({.iter = 0, .energy = 1.5, .grad_norm = 0.25});
  rep.records.push_back({.iter = 1, .energy = 1.25, .grad_norm = 0.125, .step = 0.5, .ls_evals = 3});
  std::ostringstream os;
  write_report_csv(os, rep);
  CHECK(os.str() == "iter,F,grad_norm,lambda,ls_evals\n0,1.5,0.25,0,0\n1,1.25,0.125,0.5,3\n");
  CHECK_THROWS_AS(save_report_csv(rep, "/nonexistent-dir/r.csv"), IoError);
}

TEST_CASE("shortest round-trip decimal") {
  for (double v : {0.1, 1.0 / 3, -2.5e-300, 1e300, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(0.1) == "0.1");
}
