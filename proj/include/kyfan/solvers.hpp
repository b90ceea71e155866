#pragma once

#include <functional>
#include <vector>

#include "kyfan/matrix.hpp"

/// Small dense convex minimizers over R^n.  All of them take an oracle that returns
/// the value at x and writes one subgradient into g.
namespace kyfan::opt {

using Oracle = std::function<double(const RVector& x, RVector& g)>;

struct LocalResult {
  RVector x;
  double f = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Subgradient steps with the Polyak rule, using f_best - delta_k as the target level.
LocalResult polyak(const Oracle& f, RVector x0, int max_iter, double scale);

/// BFGS with a weak Wolfe line search; also effective on nonsmooth convex functions,
/// where it stops once the line search can no longer make progress.
LocalResult bfgs(const Oracle& f, RVector x0, int max_iter, double grad_tol);

struct EllipsoidResult {
  RVector x;
  double f = 0.0;
  double gap = 0.0; ///< upper bound on f - min, valid if the initial ball held a minimizer
  int iterations = 0;
  bool feasible = false;
  bool converged = false;
};

/// Deep-cut ellipsoid method on the ball of `radius` around `center`.  Constraints are
/// h(x) <= 0; a point counts as feasible when every h is at most `feasibility_tol`.
/// Stops when the gap bound drops below `gap_tol`.
EllipsoidResult ellipsoid(const Oracle& f, const std::vector<Oracle>& constraints, const RVector& center,
                          double radius, int max_iter, double gap_tol, double feasibility_tol = 0.0);

/// Damped Newton steps with a finite-difference Hessian of the oracle's gradient.
/// Only improving steps are accepted, so it is harmless at nonsmooth points.
LocalResult newton_polish(const Oracle& f, RVector x, int max_iter);

/// Coarse-to-fine search on the 3^n stencil x + h {-1, 0, 1}^n, halving h whenever
/// the centre is best.  Intended for n <= 4.
LocalResult pattern_search(const Oracle& f, RVector x, double radius, double min_step);

} // namespace kyfan::opt
