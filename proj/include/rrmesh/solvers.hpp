#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

#include "rrmesh/sparse.hpp"

namespace rrmesh {

struct CgResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Solves P x = b by Jacobi-preconditioned conjugate gradients starting from
/// the incoming x. Convergence is judged on the true relative residual.
/// max_iters <= 0 means the matrix dimension. Throws IndefiniteMatrix when a
/// diagonal entry or a search direction has non-positive curvature.
CgResult cg_solve(const CsrMatrix& p, std::span<const double> b, std::span<double> x, double tol,
                  int max_iters = 0);

/// Value and directional derivative of the objective along a search line.
struct LinePoint {
  double value;
  double slope;
};
using LineFunction = std::function<LinePoint(double)>;

struct LineSearchParams {
  double c1 = 1e-4;
  double c2 = 0.9;
  double initial_step = 1.0;
  double step_cap = std::numeric_limits<double>::infinity();
  double shrink = 0.5;       // backtracking only
  double expand = 4.0;       // strong Wolfe bracketing growth
  double min_step = 1e-20;   // backtracking underflow
  int max_evaluations = 40;  // strong Wolfe only
};

enum class LineSearchStatus {
  Converged,   // all requested conditions hold
  CappedStep,  // stopped at the step cap with sufficient decrease only
};

struct LineSearchResult {
  double step = 0.0;
  LinePoint point{0.0, 0.0};
  int evaluations = 0;
  LineSearchStatus status = LineSearchStatus::Converged;
};

/// Strong Wolfe search by bracketing and zoom with safeguarded cubic
/// interpolation. Non-finite values are treated as overshooting. Throws
/// LineSearchFailed on a non-descent direction or when evaluations run out.
LineSearchResult strong_wolfe_search(const LineFunction& f, LinePoint at_zero,
                                     const LineSearchParams& params);

/// Armijo backtracking. Throws LineSearchFailed on a non-descent direction or
/// when the step underflows.
LineSearchResult backtracking_search(const LineFunction& f, LinePoint at_zero,
                                     const LineSearchParams& params);

bool armijo_holds(const LinePoint& at_zero, const LinePoint& at_step, double step, double c1);
bool curvature_holds(const LinePoint& at_zero, const LinePoint& at_step, double c2);

}  // namespace rrmesh
