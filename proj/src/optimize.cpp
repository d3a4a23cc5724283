#include "rrmesh/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rrmesh/error.hpp"
#include "rrmesh/kernels.hpp"
#include "rrmesh/step_bound.hpp"

namespace rrmesh {

const char* method_name(Method m) {
  switch (m) {
    case Method::FixedPoint: return "fixedpoint";
    case Method::LBFGS: return "lbfgs";
    case Method::PLBFGS: return "plbfgs";
    case Method::NLCG: return "nlcg";
    case Method::PNLCG: return "pnlcg";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  for (Method m : {Method::FixedPoint, Method::LBFGS, Method::PLBFGS, Method::NLCG, Method::PNLCG})
    if (name == method_name(m)) return m;
  return std::nullopt;
}

bool is_preconditioned(Method m) {
  return m == Method::FixedPoint || m == Method::PLBFGS || m == Method::PNLCG;
}

const char* termination_name(TerminationReason r) {
  switch (r) {
    case TerminationReason::GradientTolerance: return "gradient tolerance";
    case TerminationReason::EnergyTolerance: return "energy tolerance";
    case TerminationReason::MaxIterations: return "iteration limit";
    case TerminationReason::LineSearchFailed: return "line search failed";
    case TerminationReason::Error: return "error";
  }
  return "?";
}

void OptimizeConfig::validate() const {
  const auto require = [](bool ok, const char* what) {
    if (!ok) throw InvalidSpec(std::string("invalid optimizer setting: ") + what);
  };
  require(max_iters >= 0, "max_iters must be >= 0");
  require(grad_tol >= 0.0, "grad_tol must be >= 0");
  require(grad_abs_tol >= 0.0, "grad_abs_tol must be >= 0");
  require(energy_tol >= 0.0, "energy_tol must be >= 0");
  require(energy_window >= 1, "energy_window must be >= 1");
  require(lbfgs_memory >= 1, "lbfgs_memory must be >= 1");
  require(c1 > 0.0 && c1 < c2 && c2 < 1.0, "need 0 < c1 < c2 < 1");
  require(backtrack_shrink > 0.0 && backtrack_shrink < 1.0, "backtrack_shrink must be in (0, 1)");
  require(step_cap_fraction > 0.0 && step_cap_fraction <= 1.0,
          "step_cap_fraction must be in (0, 1]");
  require(cg_tol > 0.0, "cg_tol must be > 0");
  require(cg_max_iters >= 0, "cg_max_iters must be >= 0");
  require(precondition_refresh >= 1, "precondition_refresh must be >= 1");
  require(line_search_max_evals >= 1, "line_search_max_evals must be >= 1");
}

std::vector<double> two_loop(const std::deque<CurvaturePair>& pairs, std::span<const double> q_in,
                             const std::function<void(std::span<const double>, std::span<double>)>& h0) {
  std::vector<double> q(q_in.begin(), q_in.end());
  std::vector<double> alpha(pairs.size());
  for (std::size_t i = pairs.size(); i-- > 0;) {
    alpha[i] = pairs[i].rho * kernels::dot(pairs[i].s, q);
    kernels::axpy(-alpha[i], pairs[i].y, q);
  }
  std::vector<double> r(q.size());
  h0(q, r);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * kernels::dot(pairs[i].y, r);
    kernels::axpy(alpha[i] - beta, pairs[i].s, r);
  }
  return r;
}

double polak_ribiere_beta(std::span<const double> g_new, std::span<const double> g_old) {
  const double denom = kernels::dot(g_old, g_old);
  if (!(denom > 0.0)) return 0.0;
  const double num = kernels::dot(g_new, g_new) - kernels::dot(g_new, g_old);
  return std::max(0.0, num / denom);
}

namespace {

double inf_norm(std::span<const double> v) { return kernels::norm_inf(v); }

class Minimizer {
 public:
  Minimizer(Objective& obj, std::vector<double>& x, const OptimizeConfig& cfg, const MinimizeHooks& hooks)
      : obj_(obj), x_(x), cfg_(cfg), hooks_(hooks), n_(obj.dimension()),
        g_(n_), xt_(n_), gt_(n_) {}

  SolverReport run();

 private:
  void apply_h0(std::span<const double> q, std::span<double> r) {
    if (preconditioned_) obj_.apply_preconditioner(q, r);
    else std::copy(q.begin(), q.end(), r.begin());
  }
  std::vector<double> steepest(bool preconditioned) {
    std::vector<double> d(n_);
    if (preconditioned) apply_h0(g_, d);
    else d = g_;
    for (double& v : d) v = -v;
    obj_.project(d);
    return d;
  }
  LinePoint eval_line(double t, std::span<const double> d) {
    for (std::size_t i = 0; i < n_; ++i) xt_[i] = d[i] == 0.0 ? x_[i] : x_[i] + t * d[i];
    const double f = obj_.evaluate(xt_, gt_);
    ++report_.evaluations;
    last_t_ = t;
    if (std::isfinite(f)) {
      best_trial_ = std::min(best_trial_, f);
      closest_trial_ = std::min(closest_trial_, std::abs(f - f_));
    }
    if (!std::isfinite(f)) return {std::numeric_limits<double>::infinity(), std::nan("")};
    return {f, kernels::dot(gt_, d)};
  }
  LineSearchResult search(std::span<const double> d, double slope0, double initial, bool& wolfe);

  Objective& obj_;
  std::vector<double>& x_;
  const OptimizeConfig& cfg_;
  const MinimizeHooks& hooks_;
  std::size_t n_;
  std::vector<double> g_, xt_, gt_;
  double f_ = 0.0;
  double last_t_ = -1.0;
  double best_trial_ = 0.0, closest_trial_ = 0.0;
  bool preconditioned_ = false;
  SolverReport report_;
};

LineSearchResult Minimizer::search(std::span<const double> d, double slope0, double initial,
                                   bool& wolfe) {
  const double bound = obj_.max_step(x_, d);
  LineSearchParams prm;
  prm.c1 = cfg_.c1;
  prm.c2 = cfg_.c2;
  prm.shrink = cfg_.backtrack_shrink;
  prm.max_evaluations = cfg_.line_search_max_evals;
  prm.step_cap = std::isfinite(bound) ? cfg_.step_cap_fraction * bound : bound;
  prm.initial_step = initial;
  if (!(prm.step_cap > 0.0)) throw LineSearchFailed("no admissible step along the search direction");
  const LineFunction fn = [&](double t) { return eval_line(t, d); };
  const LinePoint at_zero{f_, slope0};
  const bool backtrack = cfg_.line_search == LineSearchKind::Backtracking;
  wolfe = !backtrack;
  auto res = backtrack ? backtracking_search(fn, at_zero, prm) : strong_wolfe_search(fn, at_zero, prm);
  if (last_t_ != res.step) {
    // Reload the accepted point's gradient.
    eval_line(res.step, d);
  }
  return res;
}

SolverReport Minimizer::run() {
  cfg_.validate();
  if (x_.size() != n_) throw InvalidSpec("starting point has the wrong dimension");
  const Method m = cfg_.method;
  preconditioned_ = is_preconditioned(m);
  if (preconditioned_ && !obj_.has_preconditioner())
    throw InvalidSpec(std::string(method_name(m)) + " needs a preconditioner");
  const bool lbfgs = m == Method::LBFGS || m == Method::PLBFGS;
  const bool nlcg = m == Method::NLCG || m == Method::PNLCG;

  f_ = obj_.evaluate(x_, g_);
  ++report_.evaluations;
  if (!std::isfinite(f_)) throw DegenerateElement("starting point is outside the objective's domain");
  const double g0 = inf_norm(g_);
  report_.records.push_back({.iter = 0, .energy = f_, .grad_norm = g0});
  const double gtol = std::max(cfg_.grad_tol * g0, cfg_.grad_abs_tol);
  if (g0 <= gtol) {
    report_.reason = TerminationReason::GradientTolerance;
    return report_;
  }

  std::deque<CurvaturePair> pairs;
  std::vector<double> d_prev, g_prev;
  double slope_prev = 0.0, step_prev = 0.0;
  report_.reason = TerminationReason::MaxIterations;

  try {
    for (int k = 1; k <= cfg_.max_iters; ++k) {
      if (preconditioned_ && (k - 1) % cfg_.precondition_refresh == 0) {
        obj_.update_preconditioner(x_);
        ++report_.preconditioner_updates;
      }
      IterationRecord rec;
      rec.iter = k;
      std::vector<double> d;
      double initial = 1.0;
      if (lbfgs) {
        d = two_loop(pairs, g_, [&](std::span<const double> q, std::span<double> r) { apply_h0(q, r); });
        for (double& v : d) v = -v;
        obj_.project(d);
      } else if (nlcg) {
        d = steepest(preconditioned_);
        if (!d_prev.empty()) {
          rec.beta = polak_ribiere_beta(g_, g_prev);
          kernels::axpy(rec.beta, d_prev, d);
          obj_.project(d);
        } else {
          rec.beta = 0.0;
        }
      } else {
        d = steepest(true);
      }
      double slope = kernels::dot(g_, d);
      if (!(slope < 0.0)) {
        pairs.clear();
        d = steepest(preconditioned_);
        slope = kernels::dot(g_, d);
        if (nlcg) rec.beta = 0.0;
      }
      if (!(slope < 0.0)) {
        report_.reason = TerminationReason::GradientTolerance;
        report_.message = "no descent direction remains";
        break;
      }
      // Nonlinear CG directions are badly scaled; match the previous predicted decrease.
      if (nlcg && !d_prev.empty() && slope_prev < 0.0)
        initial = std::min(1.0, std::max(step_prev * slope_prev / slope, 1e-12) * 1.01);
      if (hooks_.on_direction) hooks_.on_direction({k, x_, g_, d});

      LineSearchResult ls;
      bool wolfe = false;
      const int evals_at_start = report_.evaluations;
      best_trial_ = f_;
      closest_trial_ = std::numeric_limits<double>::infinity();
      try {
        ls = search(d, slope, initial, wolfe);
      } catch (const LineSearchFailed&) {
        // One retry along steepest descent with fresh memory.
        rec.steepest_retry = true;
        pairs.clear();
        d = steepest(false);
        slope = kernels::dot(g_, d);
        try {
          ls = search(d, slope, 1.0, wolfe);
        } catch (const LineSearchFailed& second) {
          // Trial energies are indistinguishable from F and none is lower: F has stagnated.
          const double noise = 64 * std::numeric_limits<double>::epsilon() * std::max(std::abs(f_), 1e-300);
          if (f_ - best_trial_ <= noise && closest_trial_ <= noise) {
            report_.reason = TerminationReason::EnergyTolerance;
            report_.message = "energy stagnated at rounding level";
          } else {
            report_.reason = TerminationReason::LineSearchFailed;
            report_.message = second.what();
          }
          break;
        }
        if (nlcg) rec.beta = 0.0;
      }

      rec.step = ls.step;
      rec.ls_evals = report_.evaluations - evals_at_start;
      rec.capped = ls.status == LineSearchStatus::CappedStep;
      rec.wolfe_required = wolfe && !rec.capped;
      rec.armijo = armijo_holds({f_, slope}, ls.point, ls.step, cfg_.c1);
      rec.curvature = curvature_holds({f_, slope}, ls.point, cfg_.c2);

      if (lbfgs) {
        CurvaturePair p{std::vector<double>(n_), std::vector<double>(n_), 0.0};
        for (std::size_t i = 0; i < n_; ++i) {
          p.s[i] = xt_[i] - x_[i];
          p.y[i] = gt_[i] - g_[i];
        }
        const double ys = kernels::dot(p.y, p.s);
        const double scale = std::sqrt(kernels::dot(p.y, p.y) * kernels::dot(p.s, p.s));
        if (ys > 1e-14 * scale) {
          p.rho = 1.0 / ys;
          pairs.push_back(std::move(p));
          if (pairs.size() > static_cast<std::size_t>(cfg_.lbfgs_memory)) pairs.pop_front();
        }
      }
      if (nlcg) {
        g_prev = g_;
        d_prev = d;
        slope_prev = slope;
        step_prev = ls.step;
      }
      x_.swap(xt_);
      g_.swap(gt_);
      f_ = ls.point.value;
      last_t_ = -1.0;

      rec.energy = f_;
      rec.grad_norm = inf_norm(g_);
      report_.records.push_back(rec);

      if (rec.grad_norm <= gtol) {
        report_.reason = TerminationReason::GradientTolerance;
        break;
      }
      const int w = cfg_.energy_window;
      if (k >= w) {
        const double old = report_.records[k - w].energy;
        if (old - f_ <= cfg_.energy_tol * std::abs(old)) {
          report_.reason = TerminationReason::EnergyTolerance;
          break;
        }
      }
    }
  } catch (const Error& e) {
    report_.reason = TerminationReason::Error;
    report_.message = e.what();
  }
  return report_;
}

}  // namespace

SolverReport minimize(Objective& objective, std::vector<double>& x, const OptimizeConfig& config,
                      const MinimizeHooks& hooks) {
  Minimizer m(objective, x, config, hooks);
  return m.run();
}

MeshObjective::MeshObjective(SimplexMesh topology, bool preconditioned, double cg_tol, int cg_max_iters)
    : topology_(std::move(topology)), preconditioned_(preconditioned), cg_tol_(cg_tol),
      cg_max_iters_(cg_max_iters) {}

std::size_t MeshObjective::dimension() const { return topology_.num_vertices() * topology_.dim(); }

double MeshObjective::evaluate(std::span<const double> x, std::span<double> grad) {
  double f;
  try {
    f = energy_and_gradient(topology_, x, grad);
  } catch (const DegenerateElement&) {
    return std::numeric_limits<double>::infinity();
  }
  if (!std::isfinite(f)) return std::numeric_limits<double>::infinity();
  project(grad);
  return f;
}

double MeshObjective::max_step(std::span<const double> x, std::span<const double> d) {
  return max_safe_step(topology_.dim(), topology_.cells(), topology_.num_vertices(), x, d);
}

void MeshObjective::project(std::span<double> v) const { project_to_constraints(topology_, v); }

void MeshObjective::update_preconditioner(std::span<const double> x) {
  pc_ = assemble_preconditioner_at(topology_, x);
}

void MeshObjective::apply_preconditioner(std::span<const double> q, std::span<double> r) {
  if (!pc_) update_preconditioner(coordinate_vector(topology_));
  const std::size_t nv = topology_.num_vertices();
  const std::size_t nf = pc_->free_vertices.size();
  std::vector<double> pq(q.begin(), q.end());
  project(pq);
  std::vector<double> rhs(nf), z(nf);
  std::fill(r.begin(), r.end(), 0.0);
  for (int a = 0; a < topology_.dim(); ++a) {
    for (std::size_t i = 0; i < nf; ++i) rhs[i] = pq[a * nv + pc_->free_vertices[i]];
    std::fill(z.begin(), z.end(), 0.0);
    const CgResult cg = cg_solve(pc_->p, rhs, z, cg_tol_, cg_max_iters_);
    cg_iterations_ += cg.iterations;
    for (std::size_t i = 0; i < nf; ++i) r[a * nv + pc_->free_vertices[i]] = z[i];
  }
  project(r);
}

OptimizeResult optimize(const SimplexMesh& mesh, const OptimizeConfig& config, const MinimizeHooks& hooks) {
  config.validate();
  const auto violations = validate(mesh);
  if (!violations.empty()) throw InvalidMesh(violations.front().message);

  OptimizeResult out{mesh, {}};
  OptimizeReport& report = out.report;
  report.method = config.method;
  report.before = quality_stats(mesh);

  OptimizeConfig cfg = config;
  if (cfg.line_search == LineSearchKind::Auto)
    cfg.line_search = config.method == Method::FixedPoint && mesh.dim() == 2 ? LineSearchKind::Backtracking
                                                                             : LineSearchKind::StrongWolfe;

  MeshObjective objective(mesh, is_preconditioned(cfg.method), cfg.cg_tol, cfg.cg_max_iters);
  std::vector<double> x = coordinate_vector(mesh);
  try {
    report.solver = minimize(objective, x, cfg, hooks);
  } catch (const Error& e) {
    report.solver.reason = TerminationReason::Error;
    report.solver.message = e.what();
  }
  report.cg_iterations = objective.cg_iterations();
  if (report.solver.reason == TerminationReason::Error) report.error = report.solver.message;

  set_coordinate_vector(out.mesh, x);
  try {
    report.after = quality_stats(out.mesh);
  } catch (const Error& e) {
    if (!report.error) report.error = e.what();
  }
  return out;
}

}  // namespace rrmesh
