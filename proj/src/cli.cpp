#include "rrmesh/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <map>
#include <ostream>
#include <utility>

#include "rrmesh/error.hpp"
#include "rrmesh/generate.hpp"
#include "rrmesh/io.hpp"
#include "rrmesh/kernels.hpp"
#include "rrmesh/optimize.hpp"
#include "rrmesh/quality.hpp"

namespace rrmesh {
namespace {

struct Options {
  std::string backend = "auto";
  std::string input, output, report, overlay;
  std::string method = "plbfgs";
  std::string boundary;
  int max_iters = 200;
  double grad_tol = 1e-8;
  std::string kind;
  int n = 0;
  double jitter = 0.0;
  std::uint64_t seed = 0;
  std::pair<int, double> sliver{0, 0.0};
};

void print_warnings(const LoadedMesh& m, std::ostream& err) {
  for (const auto& w : m.warnings) err << "warning: " << w << '\n';
}

int run_quality(const Options& o, std::ostream& out, std::ostream& err) {
  const LoadedMesh m = load_mesh(o.input);
  print_warnings(m, err);
  out << o.input << ": " << m.mesh.num_vertices() << " vertices, dimension " << m.mesh.dim() << '\n';
  write_quality_table(out, quality_stats(m.mesh));
  return kExitOk;
}

int run_gen(const Options& o, std::ostream& out) {
  static const std::map<std::string, GeneratorKind> kinds{
      {"equilateral", GeneratorKind::Equilateral}, {"square", GeneratorKind::Square}, {"cube", GeneratorKind::Cube}};
  const SimplexMesh mesh = gen_mesh({kinds.at(o.kind), o.n});
  save_mesh(mesh, o.output);
  out << "wrote " << o.output << ": " << mesh.num_vertices() << " vertices, " << mesh.num_cells() << " cells\n";
  return kExitOk;
}

int run_perturb(const Options& o, bool sliver, std::ostream& out, std::ostream& err) {
  const LoadedMesh m = load_mesh(o.input);
  print_warnings(m, err);
  PerturbMode mode = sliver ? PerturbMode{PlantSliver{o.sliver.first, o.sliver.second}}
                            : PerturbMode{RandomJitter{o.jitter, o.seed}};
  const SimplexMesh result = perturb_mesh(m.mesh, mode);
  save_mesh(result, o.output);
  out << "wrote " << o.output << '\n';
  if (sliver) out << "slivers " << o.sliver.first << " eps " << o.sliver.second << '\n';
  else out << "jitter " << o.jitter << " seed " << o.seed << " (mt19937_64)\n";
  write_quality_table(out, quality_stats(result));
  return kExitOk;
}

int run_optimize(const Options& o, std::ostream& out, std::ostream& err) {
  LoadedMesh m = load_mesh(o.input);
  print_warnings(m, err);
  const bool tagged = std::any_of(m.mesh.constraints().begin(), m.mesh.constraints().end(),
                                  [](const Constraint& c) { return c.kind != ConstraintKind::Free; });
  if (!o.boundary.empty() || !tagged)
    apply_boundary_policy(m.mesh, o.boundary == "slide-planar" ? BoundaryPolicy::SlidePlanar : BoundaryPolicy::FixAll);

  OptimizeConfig cfg;
  cfg.method = *parse_method(o.method);
  cfg.max_iters = o.max_iters;
  cfg.grad_tol = o.grad_tol;
  const OptimizeResult res = optimize(m.mesh, cfg);

  // Outputs are written even when the run failed part way.
  save_mesh(res.mesh, o.output);
  if (!o.report.empty()) save_report_csv(res.report.solver, o.report);
  if (!o.overlay.empty()) save_quality_overlay(res.mesh, o.overlay);
  write_report_text(out, res.report);
  if (!res.report.ok()) {
    err << "error: optimization failed: " << *res.report.error << '\n';
    return kExitOptimizer;
  }
  if (res.report.solver.reason == TerminationReason::LineSearchFailed)
    err << "warning: stopped early: " << res.report.solver.message << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radius-ratio mesh quality optimizer", "rrmesh"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--backend", o.backend, "Kernel backend")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}))
      ->capture_default_str();

  auto* quality = app.add_subcommand("quality", "Print quality statistics of a mesh");
  quality->add_option("input", o.input, "Mesh file (.msh or .rrm)")->required();

  auto* opt = app.add_subcommand("optimize", "Improve mesh quality by minimizing the mean radius ratio");
  opt->add_option("input", o.input, "Input mesh (.msh or .rrm)")->required();
  opt->add_option("output", o.output, "Output mesh (.msh, .vtk or .rrm)")->required();
  opt->add_option("--method", o.method, "Optimizer")
      ->check(CLI::IsMember({"fixedpoint", "lbfgs", "plbfgs", "nlcg", "pnlcg"}))
      ->capture_default_str();
  opt->add_option("--boundary", o.boundary,
                  "Boundary policy (default: constraints stored in a .rrm input, else fix-all)")
      ->check(CLI::IsMember({"fix-all", "slide-planar"}));
  opt->add_option("--max-iters", o.max_iters, "Iteration limit")->check(CLI::NonNegativeNumber)->capture_default_str();
  opt->add_option("--grad-tol", o.grad_tol, "Relative gradient tolerance")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  opt->add_option("--report", o.report, "Per-iteration CSV report");
  opt->add_option("--quality-vtk", o.overlay, "VTK file with per-cell quality of the result");

  auto* gen = app.add_subcommand("gen", "Generate a structured test mesh");
  gen->add_option("--kind", o.kind, "Mesh family")->required()->check(CLI::IsMember({"equilateral", "square", "cube"}));
  gen->add_option("--n", o.n, "Cells per side")->required()->check(CLI::PositiveNumber);
  gen->add_option("output", o.output, "Output mesh")->required();

  auto* perturb = app.add_subcommand("perturb", "Perturb interior vertices or plant slivers");
  perturb->add_option("input", o.input, "Input mesh")->required();
  perturb->add_option("output", o.output, "Output mesh")->required();
  auto* jitter = perturb->add_option("--jitter", o.jitter, "Amplitude as a fraction of the shortest incident edge")
                     ->check(CLI::NonNegativeNumber);
  auto* seed = perturb->add_option("--seed", o.seed, "Random seed");
  auto* sliver = perturb->add_option("--sliver", o.sliver, "Plant COUNT slivers of relative height EPS")
                     ->type_name("COUNT EPS");
  jitter->excludes(sliver);
  seed->needs(jitter);

  std::vector<std::string> argv_store{"rrmesh"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (perturb->parsed() && sliver->count() == 0 && jitter->count() == 0)
      throw CLI::ValidationError("perturb", "needs --jitter or --sliver");
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitInvalid;
  }

  try {
    if (o.backend == "scalar") kernels::set_backend(kernels::Backend::Scalar);
    else if (o.backend == "avx2") kernels::set_backend(kernels::Backend::Avx2);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }

  try {
    if (quality->parsed()) return run_quality(o, out, err);
    if (gen->parsed()) return run_gen(o, out);
    if (perturb->parsed()) return run_perturb(o, sliver->count() > 0, out, err);
    return run_optimize(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace rrmesh
