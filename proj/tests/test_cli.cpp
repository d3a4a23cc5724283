#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "rrmesh/cli.hpp"
#include "rrmesh/io.hpp"
#include "rrmesh/quality.hpp"

using namespace rrmesh;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rrmesh_test_cli";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("generate then measure") {
  const auto path = scratch("cube3.msh");
  const auto g = run({"gen", "--kind", "cube", "--n", "3", path});
  REQUIRE(g.code == kExitOk);
  const auto q = run({"quality", path});
  CHECK(q.code == kExitOk);
  const auto at = q.out.find("min q");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(q.out.substr(at + 5)) > 0.0);
  CHECK(quality_stats(load_mesh(path).mesh).min_q > 0.0);
}

TEST_CASE("optimize writes a mesh, a report and an overlay") {
  const auto base = scratch("sq.rrm"), rough = scratch("sq_rough.rrm");
  REQUIRE(run({"gen", "--kind", "square", "--n", "6", base}).code == kExitOk);
  REQUIRE(run({"perturb", base, rough, "--jitter", "0.35", "--seed", "3"}).code == kExitOk);
  const auto out = scratch("sq_opt.msh"), csv = scratch("sq.csv"), vtk = scratch("sq_q.vtk");
  for (const char* method : {"fixedpoint", "lbfgs", "plbfgs", "nlcg", "pnlcg"}) {
    CAPTURE(std::string(method));
    const auto r = run({"optimize", rough, out, "--method", method, "--report", csv, "--quality-vtk", vtk});
    REQUIRE(r.code == kExitOk);
    const auto rows = read_csv(csv);
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0] == std::vector<std::string>{"iter", "F", "grad_norm", "lambda", "ls_evals"});
    const auto it = r.out.find("iterations");
    REQUIRE(it != std::string::npos);
    const int iterations = std::stoi(r.out.substr(it + 10));
    CHECK(rows.size() == static_cast<std::size_t>(iterations) + 2);  // header, iteration 0, each iteration
    for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][1]) <= std::stod(rows[k - 1][1]));
    const auto before = quality_stats(load_mesh(rough).mesh), after = quality_stats(load_mesh(out).mesh);
    CHECK(after.min_q > before.min_q);
    CHECK(std::filesystem::file_size(vtk) > 0);
  }
}

TEST_CASE("stored constraints are kept unless a policy is given") {
  const auto base = scratch("cube_tags.rrm"), rough = scratch("cube_tags_rough.rrm"), out = scratch("cube_tags_opt.rrm");
  REQUIRE(run({"gen", "--kind", "cube", "--n", "3", base}).code == kExitOk);
  REQUIRE(run({"perturb", base, rough, "--jitter", "0.3", "--seed", "5"}).code == kExitOk);
  REQUIRE(run({"optimize", rough, out, "--boundary", "slide-planar", "--max-iters", "5"}).code == kExitOk);
  const auto slid = load_mesh(out).mesh;
  std::size_t sliding = 0;
  for (const auto& c : slid.constraints()) sliding += c.kind == ConstraintKind::SlidePlane;
  CHECK(sliding > 0);
  // Re-optimizing the tagged result without --boundary keeps the slide tags.
  const auto again = scratch("cube_tags_again.rrm");
  REQUIRE(run({"optimize", out, again, "--max-iters", "2"}).code == kExitOk);
  CHECK(load_mesh(again).mesh.constraints() == slid.constraints());
}

TEST_CASE("identical runs give byte-identical outputs") {
  const auto base = scratch("det.msh");
  REQUIRE(run({"gen", "--kind", "cube", "--n", "3", base}).code == kExitOk);
  std::string mesh[2], csv[2], jit[2];
  for (int k = 0; k < 2; ++k) {
    const auto j = scratch("det_j" + std::to_string(k) + ".msh");
    const auto o = scratch("det_o" + std::to_string(k) + ".msh"), r = scratch("det_r" + std::to_string(k) + ".csv");
    const auto p = run({"perturb", base, j, "--jitter", "0.3", "--seed", "11"});
    REQUIRE(p.code == kExitOk);
    CHECK(p.out.find("seed 11") != std::string::npos);
    REQUIRE(run({"optimize", j, o, "--method", "pnlcg", "--report", r}).code == kExitOk);
    jit[k] = slurp(j);
    mesh[k] = slurp(o);
    csv[k] = slurp(r);
  }
  CHECK(jit[0] == jit[1]);
  CHECK(mesh[0] == mesh[1]);
  CHECK(csv[0] == csv[1]);
  CHECK_FALSE(mesh[0].empty());
}

TEST_CASE("usage errors exit with 1") {
  const auto bad_flag = run({"optimize", "a.msh", "b.msh", "--no-such-flag"});
  CHECK(bad_flag.code == kExitInvalid);
  CHECK(bad_flag.err.find("error:") != std::string::npos);
  CHECK(bad_flag.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == kExitInvalid);
  CHECK(run({"optimize", "a.msh", "b.msh", "--method", "newton"}).code == kExitInvalid);
  CHECK(run({"perturb", "a.msh", "b.msh"}).code == kExitInvalid);
  CHECK(run({"quality", scratch("does_not_exist.msh")}).code == kExitInvalid);
  CHECK(run({"gen", "--kind", "cube", "--n", "2", scratch("cube.obj")}).code == kExitInvalid);
  const auto help = run({"optimize", "--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("--method") != std::string::npos);
}

TEST_CASE("optimizer failure exits with 2 and still writes outputs") {
  // Every vertex slides, none is fixed: the preconditioner cannot be built.
  const auto in = scratch("all_slide.rrm");
  {
    std::ofstream f(in);
    f << "rrmesh-native 1\ndim 2\nnv 4\nnc 2\n0 0\n1 0\n1 1\n0.2 1\n0 1 2\n0 2 3\n";
    for (int i = 0; i < 4; ++i) f << "slide 0 1\n";
  }
  const auto out = scratch("all_slide_out.rrm"), csv = scratch("all_slide.csv");
  std::filesystem::remove(out);
  const auto r = run({"optimize", in, out, "--method", "plbfgs", "--report", csv});
  CHECK(r.code == kExitOptimizer);
  CHECK(r.err.find("error:") != std::string::npos);
  CHECK(std::filesystem::exists(out));
  CHECK(std::filesystem::exists(csv));
}
