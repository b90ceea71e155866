#include "kyfan/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kyfan::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Counted {
  const Oracle& f;
  int evaluations = 0;
  double operator()(const RVector& x, RVector& g)
  {
    ++evaluations;
    g.resize(x.size());
    return f(x, g);
  }
};

} // namespace

LocalResult polyak(const Oracle& oracle, RVector x, int max_iter, double scale)
{
  Counted f{oracle};
  RVector g;
  double fx = f(x, g);
  LocalResult best{x, fx, 0, 0};
  double delta = 0.1 * std::max(scale, 1e-300);
  int stall = 0;
  for (int it = 0; it < max_iter; ++it) {
    best.iterations = it + 1;
    const double gg = g.squaredNorm();
    if (gg == 0.0) break;
    x -= ((fx - best.f + delta) / gg) * g;
    fx = f(x, g);
    if (fx < best.f) {
      best.x = x;
      best.f = fx;
      stall = 0;
    } else if (++stall >= 5) {
      delta *= 0.5;
      stall = 0;
      x = best.x;
      fx = f(x, g);
    }
    if (delta < 1e-15 * scale) break;
  }
  best.evaluations = f.evaluations;
  return best;
}

LocalResult bfgs(const Oracle& oracle, RVector x, int max_iter, double grad_tol)
{
  Counted f{oracle};
  const Index n = x.size();
  RVector g;
  double fx = f(x, g);
  RMatrix H = RMatrix::Identity(n, n);
  bool scaled = false;
  LocalResult out{x, fx, 0, 0};

  constexpr double c1 = 1e-4;
  constexpr double c2 = 0.9;
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    if (g.norm() <= grad_tol) break;
    RVector d = -H * g;
    double gd = g.dot(d);
    if (!(gd < 0.0)) {
      H.setIdentity();
      d = -g;
      gd = -g.squaredNorm();
    }

    double lo = 0.0;
    double hi = kInf;
    double t = 1.0;
    bool accepted = false;
    RVector xn, gn;
    double fn = fx;
    RVector best_x = x;
    double best_f = fx;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + t * d;
      fn = f(xn, gn);
      if (fn < best_f) {
        best_f = fn;
        best_x = xn;
      }
      if (!(fn <= fx + c1 * t * gd)) {
        hi = t;
      } else if (gn.dot(d) < c2 * gd) {
        lo = t;
      } else {
        accepted = true;
        break;
      }
      t = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * t;
      if (std::isfinite(hi) && hi - lo <= 1e-16 * std::max(1.0, hi)) break;
    }

    if (!accepted) {
      // nonsmooth kink or roundoff floor: keep the best trial point and stop
      if (best_f < fx) {
        x = best_x;
        fx = f(x, g);
      }
      break;
    }

    const RVector s = xn - x;
    const RVector y = gn - g;
    const double sy = s.dot(y);
    x = xn;
    fx = fn;
    g = gn;
    if (sy > 1e-16 * s.norm() * y.norm() && sy > 0.0) {
      if (!scaled) {
        H *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RMatrix V = RMatrix::Identity(n, n) - rho * s * y.transpose();
      H = V * H * V.transpose() + rho * s * s.transpose();
    }
  }
  out.x = x;
  out.f = fx;
  out.evaluations = f.evaluations;
  return out;
}

namespace {

EllipsoidResult interval_method(Counted& f, const std::vector<Oracle>& constraints, double centre, double radius,
                                int max_iter, double gap_tol, double feasibility_tol)
{
  EllipsoidResult out;
  out.x = RVector::Constant(1, centre);
  out.f = kInf;
  out.gap = kInf;
  double lo = centre - radius;
  double hi = centre + radius;
  RVector x(1), g(1);
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    x[0] = 0.5 * (lo + hi);
    bool cut = false;
    for (const auto& h : constraints) {
      const double hv = h(x, g);
      if (hv <= feasibility_tol) continue;
      const double excess = hv - feasibility_tol;
      if (g[0] > 0.0) hi = std::min(hi, x[0] - excess / g[0]);
      else if (g[0] < 0.0) lo = std::max(lo, x[0] - excess / g[0]);
      else lo = kInf; // a flat violated constraint leaves nothing feasible
      cut = true;
      break;
    }
    if (!cut) {
      const double fv = f(x, g);
      out.feasible = true;
      if (fv < out.f) {
        out.f = fv;
        out.x = x;
      }
      const double reach = std::abs(g[0]) * std::max(x[0] - lo, hi - x[0]);
      out.gap = std::min(out.gap, out.f - fv + reach);
      if (g[0] == 0.0) out.gap = 0.0;
      if (out.gap <= gap_tol) break;
      const double drop = fv - out.f;
      if (g[0] > 0.0) hi = std::min(hi, x[0] - drop / g[0]);
      else lo = std::max(lo, x[0] - drop / g[0]);
    }
    if (!(lo <= hi)) break;
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(x[0]))) {
      if (out.feasible) out.gap = std::min(out.gap, gap_tol);
      break;
    }
  }
  out.converged = out.feasible && out.gap <= gap_tol;
  return out;
}

} // namespace

EllipsoidResult ellipsoid(const Oracle& oracle, const std::vector<Oracle>& constraints, const RVector& center,
                          double radius, int max_iter, double gap_tol, double feasibility_tol)
{
  Counted f{oracle};
  const Index n = center.size();
  require(n >= 1 && radius > 0.0, "ellipsoid method needs a positive-dimensional ball");
  if (n == 1) return interval_method(f, constraints, center[0], radius, max_iter, gap_tol, feasibility_tol);

  EllipsoidResult out;
  out.x = center;
  out.f = kInf;
  out.gap = kInf;
  RVector x = center;
  RMatrix P = RMatrix::Identity(n, n) * (radius * radius);
  RVector g;
  const double nd = static_cast<double>(n);

  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    double alpha = 0.0;
    bool constraint_cut = false;
    for (const auto& h : constraints) {
      g.resize(n);
      const double hv = h(x, g);
      if (hv <= feasibility_tol) continue;
      const double gpg = g.dot(P * g);
      if (!(gpg > 0.0)) {
        out.converged = false;
        return out;
      }
      alpha = (hv - feasibility_tol) / std::sqrt(gpg);
      constraint_cut = true;
      break;
    }

    if (!constraint_cut) {
      const double fv = f(x, g);
      out.feasible = true;
      if (fv < out.f) {
        out.f = fv;
        out.x = x;
      }
      const double gpg = g.dot(P * g);
      if (!(gpg > 0.0)) {
        out.gap = 0.0;
        break;
      }
      const double s = std::sqrt(gpg);
      out.gap = std::min(out.gap, out.f - fv + s);
      if (out.gap <= gap_tol) break;
      alpha = (fv - out.f) / s;
    }

    if (alpha >= 1.0) {
      // the kept half-space misses the ellipsoid interior
      if (!constraint_cut) out.gap = std::min(out.gap, 0.0);
      break;
    }
    const RVector Pg = P * g;
    const RVector gt = Pg / std::sqrt(g.dot(Pg));
    x -= ((1.0 + nd * alpha) / (nd + 1.0)) * gt;
    P = (nd * nd / (nd * nd - 1.0)) * (1.0 - alpha * alpha) *
        (P - (2.0 * (1.0 + nd * alpha) / ((nd + 1.0) * (1.0 + alpha))) * gt * gt.transpose());
    P = 0.5 * (P + P.transpose());
  }
  out.converged = out.feasible && out.gap <= gap_tol;
  return out;
}

LocalResult newton_polish(const Oracle& oracle, RVector x, int max_iter)
{
  Counted f{oracle};
  const Index n = x.size();
  RVector g;
  double fx = f(x, g);
  LocalResult out{x, fx, 0, 0};
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    const double gnorm = g.norm();
    if (gnorm == 0.0) break;
    const double h = 1e-6 * (1.0 + x.norm());
    RMatrix H(n, n);
    RVector gp, gm;
    for (Index j = 0; j < n; ++j) {
      RVector xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      f(xp, gp);
      f(xm, gm);
      H.col(j) = (gp - gm) / (2.0 * h);
    }
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(H);
    RVector lam = es.eigenvalues();
    const double top = std::max(lam.cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < n; ++i) lam[i] = std::max(lam[i], 1e-10 * top);
    const RVector d = -(es.eigenvectors() * (es.eigenvectors().transpose() * g).cwiseQuotient(lam));

    bool moved = false;
    double t = 1.0;
    RVector xn, gn;
    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
      xn = x + t * d;
      const double fn = f(xn, gn);
      const bool lower = fn < fx;
      const bool flatter = fn <= fx + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(fx) &&
                           gn.norm() < 0.5 * gnorm;
      if (lower || flatter) {
        x = xn;
        fx = fn;
        g = gn;
        moved = true;
        break;
      }
    }
    if (!moved || (t * d).norm() <= 1e-15 * (1.0 + x.norm())) break;
  }
  out.x = x;
  out.f = fx;
  out.evaluations = f.evaluations;
  return out;
}

LocalResult pattern_search(const Oracle& oracle, RVector x, double radius, double min_step)
{
  Counted f{oracle};
  const Index n = x.size();
  Index stencil = 1;
  for (Index i = 0; i < n; ++i) stencil *= 3;
  RVector g;
  double fx = f(x, g);
  LocalResult out{x, fx, 0, 0};
  double h = radius;
  for (int it = 0; it < 20000 && h > min_step; ++it) {
    out.iterations = it + 1;
    RVector best_x = x;
    double best_f = fx;
    for (Index code = 0; code < stencil; ++code) {
      RVector y = x;
      Index c = code;
      bool centre = true;
      for (Index i = 0; i < n; ++i, c /= 3) {
        const int step = static_cast<int>(c % 3) - 1;
        centre = centre && step == 0;
        y[i] += h * step;
      }
      if (centre) continue;
      const double fy = f(y, g);
      if (fy < best_f) {
        best_f = fy;
        best_x = y;
      }
    }
    if (best_f < fx) {
      x = best_x;
      fx = best_f;
    } else {
      h *= 0.5;
    }
  }
  out.x = x;
  out.f = fx;
  out.evaluations = f.evaluations;
  return out;
}

} // namespace kyfan::opt
