#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rrmesh/assembly.hpp"
#include "rrmesh/mesh.hpp"
#include "rrmesh/quality.hpp"
#include "rrmesh/solvers.hpp"

namespace rrmesh {

/// Smooth objective over R^n restricted to an affine feasible set.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dimension() const = 0;
  /// Value and gradient projected onto the feasible directions; +inf when x
  /// is outside the domain (the gradient is then unspecified).
  virtual double evaluate(std::span<const double> x, std::span<double> grad) = 0;
  /// Largest step along d that keeps x inside the domain.
  virtual double max_step(std::span<const double> /*x*/, std::span<const double> /*d*/) {
    return std::numeric_limits<double>::infinity();
  }
  /// Projects a direction onto the feasible directions, in place.
  virtual void project(std::span<double> /*v*/) const {}

  virtual bool has_preconditioner() const { return false; }
  virtual void update_preconditioner(std::span<const double> /*x*/) {}
  /// r = H0 q for a symmetric positive definite H0 approximating the inverse Hessian.
  virtual void apply_preconditioner(std::span<const double> q, std::span<double> r) {
    std::copy(q.begin(), q.end(), r.begin());
  }
};

enum class Method { FixedPoint, LBFGS, PLBFGS, NLCG, PNLCG };
enum class LineSearchKind { Auto, StrongWolfe, Backtracking };

const char* method_name(Method m);
std::optional<Method> parse_method(const std::string& name);
bool is_preconditioned(Method m);

struct OptimizeConfig {
  Method method = Method::PLBFGS;
  int max_iters = 200;
  double grad_tol = 1e-8;       // relative to the initial free-gradient inf-norm
  double grad_abs_tol = 1e-12;  // absolute floor on the free-gradient inf-norm
  double energy_tol = 1e-12;    // relative decrease over energy_window iterations
  int energy_window = 3;
  int lbfgs_memory = 10;
  double c1 = 1e-4;
  double c2 = 0.9;
  double backtrack_shrink = 0.5;
  double step_cap_fraction = 0.9;  // of the inversion bound
  double cg_tol = 1e-8;
  int cg_max_iters = 0;  // 0 = reduced dimension
  int precondition_refresh = 1;
  /// Auto: backtracking for 2D fixed-point iteration, strong Wolfe otherwise.
  LineSearchKind line_search = LineSearchKind::Auto;
  int line_search_max_evals = 40;

  /// Throws InvalidSpec when a field is out of range.
  void validate() const;
};

enum class TerminationReason { GradientTolerance, EnergyTolerance, MaxIterations, LineSearchFailed, Error };
const char* termination_name(TerminationReason r);

struct IterationRecord {
  int iter = 0;
  double energy = 0.0;
  double grad_norm = 0.0;  // free-gradient inf-norm
  double step = 0.0;
  int ls_evals = 0;
  bool armijo = true;
  bool curvature = true;   // strong Wolfe curvature condition at the accepted step
  bool capped = false;     // accepted at the inversion cap
  bool wolfe_required = false;
  bool steepest_retry = false;
  double beta = std::numeric_limits<double>::quiet_NaN();  // nonlinear CG only
};

/// Everything one step of the minimiser saw; passed to the optional observer.
struct StepObservation {
  int iter;
  std::span<const double> x;
  std::span<const double> gradient;
  std::span<const double> direction;
};

struct SolverReport {
  std::vector<IterationRecord> records;  // records[0] is the starting point
  int evaluations = 0;
  int preconditioner_updates = 0;
  TerminationReason reason = TerminationReason::MaxIterations;
  std::string message;
  int iterations() const { return records.empty() ? 0 : static_cast<int>(records.size()) - 1; }
};

struct MinimizeHooks {
  std::function<void(const StepObservation&)> on_direction;
};

/// Runs the configured method on x in place. Errors raised while iterating
/// end the run with TerminationReason::Error and x at the last accepted
/// iterate; an invalid configuration or starting point throws.
SolverReport minimize(Objective& objective, std::vector<double>& x, const OptimizeConfig& config,
                      const MinimizeHooks& hooks = {});

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

/// Two-loop recursion: returns r = H q for the limited-memory inverse
/// Hessian built from `pairs` (oldest first) over the initial matrix H0.
std::vector<double> two_loop(const std::deque<CurvaturePair>& pairs, std::span<const double> q,
                             const std::function<void(std::span<const double>, std::span<double>)>& h0);

/// Polak-Ribiere coefficient g_new.(g_new - g_old) / g_old.g_old, clipped at zero.
double polak_ribiere_beta(std::span<const double> g_new, std::span<const double> g_old);

/// The mesh energy over all coordinates, with constraints applied by
/// projection and an inversion guard on every step.
class MeshObjective : public Objective {
 public:
  MeshObjective(SimplexMesh topology, bool preconditioned, double cg_tol, int cg_max_iters);
  std::size_t dimension() const override;
  double evaluate(std::span<const double> x, std::span<double> grad) override;
  double max_step(std::span<const double> x, std::span<const double> d) override;
  void project(std::span<double> v) const override;
  bool has_preconditioner() const override { return preconditioned_; }
  void update_preconditioner(std::span<const double> x) override;
  void apply_preconditioner(std::span<const double> q, std::span<double> r) override;

  const SimplexMesh& topology() const { return topology_; }
  long cg_iterations() const { return cg_iterations_; }

 private:
  SimplexMesh topology_;
  bool preconditioned_;
  double cg_tol_;
  int cg_max_iters_;
  std::optional<Preconditioner> pc_;
  long cg_iterations_ = 0;
};

struct OptimizeReport {
  Method method = Method::PLBFGS;
  SolverReport solver;
  long cg_iterations = 0;
  QualityStats before;
  std::optional<QualityStats> after;
  std::optional<std::string> error;  // set when the run stopped on an error
  bool ok() const { return !error.has_value(); }
};

struct OptimizeResult {
  SimplexMesh mesh;
  OptimizeReport report;
};

/// Never throws for optimisation failures: the report carries the error and
/// `mesh` holds the last accepted iterate. Invalid configurations and
/// invalid input meshes still throw.
OptimizeResult optimize(const SimplexMesh& mesh, const OptimizeConfig& config, const MinimizeHooks& hooks = {});

}  // namespace rrmesh
