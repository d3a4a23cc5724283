#include <algorithm>
#include <cmath>
#include <string>

#include "rrmesh/error.hpp"
#include "rrmesh/solvers.hpp"

namespace rrmesh {
namespace {

struct Sample {
  double step;
  LinePoint p;
};

bool finite(const LinePoint& p) { return std::isfinite(p.value) && std::isfinite(p.slope); }

// Minimiser of the cubic matching values and slopes at a and b, or NaN.
double cubic_minimizer(const Sample& a, const Sample& b) {
  const double h = b.step - a.step;
  const double d1 = a.p.slope + b.p.slope - 3.0 * (a.p.value - b.p.value) / (a.step - b.step);
  const double disc = d1 * d1 - a.p.slope * b.p.slope;
  if (disc < 0.0) return std::nan("");
  const double d2 = std::copysign(std::sqrt(disc), h);
  const double denom = b.p.slope - a.p.slope + 2.0 * d2;
  if (denom == 0.0) return std::nan("");
  return b.step - h * (b.p.slope + d2 - d1) / denom;
}

void require_descent(const LinePoint& at_zero) {
  if (!(at_zero.slope < 0.0) || !std::isfinite(at_zero.value))
    throw LineSearchFailed("not a descent direction (slope " + std::to_string(at_zero.slope) + ")");
}

}  // namespace

bool armijo_holds(const LinePoint& at_zero, const LinePoint& at_step, double step, double c1) {
  return at_step.value <= at_zero.value + c1 * step * at_zero.slope;
}

bool curvature_holds(const LinePoint& at_zero, const LinePoint& at_step, double c2) {
  return std::abs(at_step.slope) <= c2 * std::abs(at_zero.slope);
}

LineSearchResult strong_wolfe_search(const LineFunction& f, LinePoint at_zero,
                                     const LineSearchParams& prm) {
  require_descent(at_zero);
  if (!(prm.step_cap > 0.0)) throw LineSearchFailed("step cap is zero");
  LineSearchResult res;
  const auto eval = [&](double t) {
    ++res.evaluations;
    return f(t);
  };
  const auto accept = [&](const Sample& s, LineSearchStatus status) {
    res.step = s.step;
    res.point = s.p;
    res.status = status;
    return res;
  };
  const auto sufficient = [&](const Sample& s) {
    return finite(s.p) && armijo_holds(at_zero, s.p, s.step, prm.c1);
  };

  // Zoom inside a bracket; `lo` satisfies sufficient decrease and has the
  // lowest value seen, `hi` bounds the acceptable region.
  const auto zoom = [&](Sample lo, Sample hi) -> LineSearchResult {
    while (res.evaluations < prm.max_evaluations) {
      const double a = std::min(lo.step, hi.step), b = std::max(lo.step, hi.step);
      double t = finite(hi.p) ? cubic_minimizer(lo, hi) : std::nan("");
      const double margin = 0.1 * (b - a);
      if (!std::isfinite(t) || t < a + margin || t > b - margin) t = 0.5 * (a + b);
      if (t <= a || t >= b) break;
      const Sample s{t, eval(t)};
      if (!sufficient(s) || s.p.value >= lo.p.value) {
        hi = s;
      } else {
        if (curvature_holds(at_zero, s.p, prm.c2)) return accept(s, LineSearchStatus::Converged);
        if (s.p.slope * (hi.step - lo.step) >= 0.0) hi = lo;
        lo = s;
      }
    }
    throw LineSearchFailed("strong Wolfe zoom did not converge in " +
                           std::to_string(res.evaluations) + " evaluations");
  };

  Sample prev{0.0, at_zero};
  double t = std::min(prm.initial_step, prm.step_cap);
  for (int i = 0; res.evaluations < prm.max_evaluations; ++i) {
    const Sample s{t, eval(t)};
    if (!sufficient(s) || (i > 0 && s.p.value >= prev.p.value)) return zoom(prev, s);
    if (curvature_holds(at_zero, s.p, prm.c2)) return accept(s, LineSearchStatus::Converged);
    if (s.p.slope >= 0.0) return zoom(s, prev);
    if (t >= prm.step_cap) return accept(s, LineSearchStatus::CappedStep);
    prev = s;
    t = std::min(t * prm.expand, prm.step_cap);
  }
  throw LineSearchFailed("strong Wolfe bracketing did not converge in " +
                         std::to_string(res.evaluations) + " evaluations");
}

LineSearchResult backtracking_search(const LineFunction& f, LinePoint at_zero,
                                     const LineSearchParams& prm) {
  require_descent(at_zero);
  LineSearchResult res;
  double t = std::min(prm.initial_step, prm.step_cap);
  while (t >= prm.min_step) {
    const LinePoint p = f(t);
    ++res.evaluations;
    if (std::isfinite(p.value) && armijo_holds(at_zero, p, t, prm.c1)) {
      res.step = t;
      res.point = p;
      return res;
    }
    t *= prm.shrink;
  }
  throw LineSearchFailed("backtracking step underflow after " + std::to_string(res.evaluations) +
                         " evaluations");
}

}  // namespace rrmesh
