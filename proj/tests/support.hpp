#pragma once

// Independent reference computations used by the test suites.  Nothing here calls the
// optimizers or decision procedures under test; only norm evaluation is shared.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "kyfan/matrix.hpp"
#include "kyfan/norms.hpp"

namespace kyfan::testing {

/// Golden-section minimum of a unimodal function on [a, b].
inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 200)
{
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

/// Minimum of a convex function of one complex variable by nested golden sections:
/// the inner minimum over the imaginary part is convex in the real part.
inline cplx golden_min_2d(const std::function<double(cplx)>& f, double re_lo, double re_hi, double im_lo, double im_hi,
                          int iters = 120)
{
  double best_im = 0.0;
  auto inner = [&](double re) {
    best_im = golden_min([&](double im) { return f({re, im}); }, im_lo, im_hi, iters);
    return f({re, best_im});
  };
  const double re = golden_min(inner, re_lo, re_hi, iters);
  inner(re);
  return {re, best_im};
}

/// U diag(sigma) V^* with Haar U, V.
inline CMatrix with_singular_values(Index m, Index n, const std::vector<double>& sigma, Rng& rng)
{
  const Index n0 = std::min(m, n);
  CMatrix D = CMatrix::Zero(n0, n0);
  for (Index i = 0; i < n0; ++i) D(i, i) = sigma[static_cast<std::size_t>(i)];
  return haar_isometry(m, n0, rng) * D * haar_isometry(n, n0, rng).adjoint();
}

/// Non-increasing spectrum with consecutive gaps of at least `gap`.
inline std::vector<double> separated_sigma(Index n0, double gap, Rng& rng)
{
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(static_cast<std::size_t>(n0));
  double v = 0.2 + u(rng);
  for (Index i = n0 - 1; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = v;
    v += gap + u(rng);
  }
  return s;
}

/// min over lambda of ||A + lambda B|| - ||A||: a polar grid (41 geometric radii, 41 angles)
/// refined twice around its best point, and nested golden sections over the bounding box,
/// which find the global minimum of this convex function even when the descent cone is
/// narrower than the angular grid.
inline double lambda_grid_drop(const CMatrix& A, const CMatrix& B, const NormSpec& spec)
{
  const double na = norm(A, spec);
  const double nb = norm(B, spec);
  const double rmax = 2.0 * na / nb;
  auto val = [&](cplx l) { return norm(A + l * B, spec) - na; };
  double best = 0.0;
  double best_r = 0.0, best_t = 0.0;
  for (int i = 0; i < 41; ++i) {
    const double r = rmax * std::pow(10.0, -7.0 * (1.0 - i / 40.0));
    for (int j = 0; j < 41; ++j) {
      const double t = 2.0 * M_PI * j / 41.0;
      const double v = val(std::polar(r, t));
      if (v < best) {
        best = v;
        best_r = r;
        best_t = t;
      }
    }
  }
  const cplx lg = golden_min_2d(val, -rmax, rmax, -rmax, rmax, 70);
  const double golden = std::min(val(lg), 0.0);
  if (best_r == 0.0) return std::min(best, golden);
  double dr = 0.5 * best_r;
  double dt = M_PI / 41.0;
  for (int level = 0; level < 2; ++level) {
    const double r0 = best_r, t0 = best_t;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const double r = r0 + dr * (i / 20.0 - 1.0);
        const double t = t0 + dt * (j / 20.0 - 1.0);
        if (r <= 0.0) continue;
        const double v = val(std::polar(r, t));
        if (v < best) {
          best = v;
          best_r = r;
          best_t = t;
        }
      }
    dr /= 10.0;
    dt /= 10.0;
  }
  return std::min(best, golden);
}

inline double max_entry_diff(const CMatrix& a, const CMatrix& b) { return max_abs(a - b); }

} // namespace kyfan::testing
