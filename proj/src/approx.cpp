#include "kyfan/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kyfan/solvers.hpp"

namespace kyfan {

namespace {

/// x (real parameters of orthonormal coordinates) -> ||A - Y(x)|| with a pulled-back subgradient.
struct Residual {
  const CMatrix& A;
  const MatrixSubspace& M;
  NormSpec spec;

  CMatrix at(const RVector& x) const { return A - M.from_ortho(M.coords_from_params(x)); }

  double operator()(const RVector& x, RVector& g) const
  {
    const CMatrix R = at(x);
    const SvdFactors f = svd(R);
    const CMatrix G = norm_subgradient(f, R.rows(), R.cols(), spec);
    const auto& Q = M.orthonormal();
    g.resize(M.real_dim());
    for (Index j = 0; j < M.dim(); ++j) {
      const cplx z = inner(Q[static_cast<std::size_t>(j)], G);
      if (M.field() == Field::Real) {
        g[j] = -z.real();
      } else {
        g[2 * j] = -z.real();
        g[2 * j + 1] = z.imag();
      }
    }
    return norm_of_sigma(f.sigma, spec);
  }

  opt::Oracle oracle() const
  {
    return [this](const RVector& x, RVector& g) { return (*this)(x, g); };
  }
};

/// Radius of a ball around x that holds every minimizer: ||Y*|| <= 2 ||A|| in the norm,
/// and the Frobenius norm is at most sqrt(n0) times any Ky Fan norm.
double containing_radius(const CMatrix& A, const NormSpec& spec, const RVector& x)
{
  const double n0 = static_cast<double>(std::min(A.rows(), A.cols()));
  return 1.5 * (2.0 * std::sqrt(n0) * norm(A, spec) + x.norm()) + 1e-12;
}

RVector params_of_user(const MatrixSubspace& M, const CVector& user)
{
  return M.params_from_coords(M.ortho_coordinates(M.from_user(user)));
}

void fill_result(ApproximationResult& out, const CMatrix& A, const MatrixSubspace& M, const NormSpec& spec,
                 const RVector& x)
{
  out.ortho_coefficients = M.coords_from_params(x);
  out.coefficients = M.ortho_to_user(out.ortho_coefficients);
  out.Y = M.from_ortho(out.ortho_coefficients);
  out.R = A - out.Y;
  out.sigmaR = svd(out.R).sigma;
  out.value = norm_of_sigma(out.sigmaR, spec);
}

} // namespace

ApproximationResult best_approx(const CMatrix& A, const MatrixSubspace& M, const NormSpec& spec,
                                const ApproxOptions& opts)
{
  if (M.dim() == 0) fail(ErrorCode::InvalidInput, "best approximation needs a non-empty basis");
  M.check_shape(A, "matrix");
  require_finite(A, "matrix");
  spec.validate(std::min(A.rows(), A.cols()));
  require(opts.starts >= 1 && opts.max_iter >= 1, "starts and max_iter must be positive");

  const Residual problem{A, M, spec};
  const opt::Oracle f = problem.oracle();
  const Index n = M.real_dim();
  const double scale = norm(A, spec);
  const double tiny = 1e-300;

  ApproximationResult out;
  SolverTrace& tr = out.trace;
  const RVector x_ls = M.params_from_coords(M.ortho_coordinates(A));
  if (scale == 0.0) {
    fill_result(out, A, M, spec, RVector::Zero(n));
    out.converged = true;
    return out;
  }

  std::vector<RVector> starts;
  if (opts.initial) {
    require(opts.initial->size() == M.dim(), "initial coefficients do not match the subspace dimension");
    starts.push_back(params_of_user(M, *opts.initial));
  }
  starts.push_back(x_ls);
  if (static_cast<int>(starts.size()) < opts.starts) starts.push_back(RVector::Zero(n));
  Rng rng(opts.seed);
  std::normal_distribution<double> normal;
  const double spread = A.norm() / std::sqrt(static_cast<double>(n));
  while (static_cast<int>(starts.size()) < opts.starts) {
    RVector x = x_ls;
    for (Index i = 0; i < n; ++i) x[i] += spread * normal(rng);
    starts.push_back(x);
  }

  const int local_iter = std::max(1, std::min(opts.max_iter, 300));
  RVector best_x = x_ls;
  double best_f = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, RVector>> locals;
  for (const RVector& s : starts) {
    const opt::LocalResult pr = opt::polyak(f, s, std::min(local_iter, 60), scale);
    locals.emplace_back(pr.f, pr.x);
    tr.iterations += pr.iterations;
    tr.evaluations += pr.evaluations;
  }
  // BFGS on the three most promising subgradient results, plus the warm start's own
  std::vector<std::size_t> order(locals.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return locals[a].first < locals[b].first; });
  std::vector<std::size_t> refine(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(3, order.size())));
  if (std::find(refine.begin(), refine.end(), 0) == refine.end()) refine.insert(refine.begin(), 0);
  if (locals.size() > 1 && std::find(refine.begin(), refine.end(), 1) == refine.end()) refine.push_back(1);
  for (std::size_t idx : refine) {
    const opt::LocalResult br = opt::bfgs(f, locals[idx].second, local_iter, 1e-13 * scale);
    tr.iterations += br.iterations;
    tr.evaluations += br.evaluations;
    if (br.f < locals[idx].first) locals[idx] = {br.f, br.x};
  }
  for (const auto& [fv, xv] : locals) {
    tr.start_values.push_back(fv);
    if (fv < best_f) {
      best_f = fv;
      best_x = xv;
    }
  }
  tr.starts = static_cast<int>(starts.size());

  const double radius = containing_radius(A, spec, best_x);
  const opt::EllipsoidResult er = opt::ellipsoid(f, {}, best_x, radius, opts.max_iter, opts.tol * scale);
  tr.iterations += er.iterations;
  tr.evaluations += er.iterations;
  if (er.feasible && er.f < best_f) {
    best_f = er.f;
    best_x = er.x;
  }
  double gap = er.gap;

  if (M.dim() <= 2) {
    const opt::LocalResult ps = opt::pattern_search(f, best_x, 0.25 * (scale + best_x.norm()),
                                                    1e-13 * (scale + best_x.norm()));
    tr.iterations += ps.iterations;
    tr.evaluations += ps.evaluations;
    if (ps.f < best_f) {
      best_f = ps.f;
      best_x = ps.x;
    }
  }

  if (n <= 16) {
    const opt::LocalResult nr = opt::newton_polish(f, best_x, 25);
    tr.iterations += nr.iterations;
    tr.evaluations += nr.evaluations;
    if (nr.f <= best_f) {
      best_f = nr.f;
      best_x = nr.x;
    }
  }

  // a small subgradient proves near-optimality over the containing ball on its own
  RVector g;
  f(best_x, g);
  gap = std::min(gap, g.norm() * containing_radius(A, spec, best_x));
  tr.gap_bound = std::max(gap, 0.0);
  const auto [lo, hi] = std::minmax_element(tr.start_values.begin(), tr.start_values.end());
  tr.start_spread = *hi - *lo;

  fill_result(out, A, M, spec, best_x);
  out.converged = tr.gap_bound <= opts.tol * std::max(scale, tiny);
  return out;
}

CertifyOutcome certify_best(const CMatrix& A, ApproximationResult& result, const MatrixSubspace& M,
                            const NormSpec& spec, double cert_tol)
{
  const Index n0 = std::min(A.rows(), A.cols());
  spec.validate(n0);
  const double p = spec.p();
  const Index k = spec.k_for(n0);
  if (p < 2.0) fail(ErrorCode::Unsupported, "certificates need p >= 2");

  CertifyOutcome out;
  if (result.R.norm() <= 1e-13 * std::max(1.0, A.norm())) {
    out.certified = true;
    out.trivial = true;
    return out;
  }
  double best_residual = std::numeric_limits<double>::infinity();
  for (double group_tol : {1e-9, 1e-8, 1e-7, 1e-6, 1e-5}) {
    CertificateOptions co;
    co.tol = cert_tol;
    co.group_tol = group_tol;
    const CertificateOutcome c = subspace_certificate(result.R, M, p, k, co);
    const double worst = std::max(c.certificate.residual_perp, c.certificate.residual_eig);
    if (c.feasible || worst < best_residual) {
      best_residual = worst;
      out.certificate = c.certificate;
      out.residual_perp = c.certificate.residual_perp;
    }
    if (c.feasible) {
      out.certified = true;
      out.F = c.certificate.F;
      result.certificate = c.certificate.F;
      break;
    }
  }
  return out;
}

UniquenessReport unique_1d_probe(const CMatrix& A, const CMatrix& X, double p, Index k, int trials,
                                 std::uint64_t seed)
{
  require(A.rows() == X.rows() && A.cols() == X.cols(), "A and X must have the same shape");
  require(max_abs(X) > 0.0, "X must be nonzero");
  require(trials >= 1, "at least one trial is needed");
  const NormSpec spec = NormSpec::kyfan(p, k);
  spec.validate(std::min(A.rows(), A.cols()));

  UniquenessReport rep;
  rep.unique_predicted = numerical_rank(X) > A.cols() - k;

  const MatrixSubspace M(A.rows(), A.cols(), {X}, Field::Complex);
  const Residual problem{A, M, spec};
  const opt::Oracle f = problem.oracle();
  const double scale = std::max(norm(A, spec), 1e-300);
  const RVector x_ls = M.params_from_coords(M.ortho_coordinates(A));

  Rng rng(seed);
  std::normal_distribution<double> normal;
  const double spread = 2.0 * std::max(A.norm(), 1e-12);
  for (int t = 0; t < trials; ++t) {
    RVector x = x_ls;
    for (Index i = 0; i < x.size(); ++i) x[i] += spread * normal(rng);
    opt::LocalResult lr = opt::bfgs(f, x, 400, 1e-14 * scale);
    const opt::EllipsoidResult er =
        opt::ellipsoid(f, {}, lr.x, 1e-3 * (scale + lr.x.norm()), 3000, 1e-15 * scale);
    if (er.feasible && er.f < lr.f) {
      lr.x = er.x;
      lr.f = er.f;
    }
    const opt::LocalResult nr = opt::newton_polish(f, lr.x, 25);
    if (nr.f <= lr.f) lr.x = nr.x;
    rep.minimizers.push_back(M.ortho_to_user(M.coords_from_params(lr.x))[0]);
  }
  for (std::size_t i = 0; i < rep.minimizers.size(); ++i)
    for (std::size_t j = i + 1; j < rep.minimizers.size(); ++j)
      rep.empirical_spread = std::max(rep.empirical_spread, std::abs(rep.minimizers[i] - rep.minimizers[j]));
  rep.violation = rep.unique_predicted && rep.empirical_spread > 1e-5;
  return rep;
}

StrictResult strict_spectral(const CMatrix& A, const MatrixSubspace& M, const StrictOptions& opts)
{
  if (M.dim() == 0) fail(ErrorCode::InvalidInput, "strict approximation needs a non-empty basis");
  M.check_shape(A, "matrix");
  const Index n0 = std::min(A.rows(), A.cols());
  StrictResult out;

  ApproxOptions first;
  first.starts = 10;
  first.max_iter = opts.max_iter;
  first.seed = opts.seed;
  first.tol = 1e-11;
  const ApproximationResult s1 = best_approx(A, M, NormSpec::spectral(), first);
  std::vector<double> minima{s1.value};
  out.stage_tol = 1e-7 * (1.0 + s1.value);
  RVector x = M.params_from_coords(s1.ortho_coefficients);
  bool all_converged = s1.converged;

  auto active_count = [&](const RVector& sigma, Index k) {
    Index c = 0;
    const double tol = opts.group_tol * std::max(1.0, sigma[0]);
    for (Index i = 0; i < sigma.size(); ++i) c += std::abs(sigma[i] - sigma[k - 1]) <= tol ? 1 : 0;
    return c;
  };
  out.stages.push_back({1, s1.value, active_count(s1.sigmaR, 1), s1.trace.gap_bound, s1.converged});

  const double radius = containing_radius(A, NormSpec::spectral(), x);
  std::vector<Residual> levels;
  levels.reserve(static_cast<std::size_t>(n0));
  for (Index k = 1; k <= n0; ++k) levels.push_back(Residual{A, M, NormSpec::kyfan(2.0, k)});

  for (Index k = 2; k <= n0; ++k) {
    StageRecord rec;
    rec.k = k;
    if (s1.value <= 1e-14 * std::max(1.0, A.norm())) {
      // A lies in M: every later stage is zero at the same point
      rec.minimum = 0.0;
      rec.converged = s1.converged;
      rec.active = n0;
      minima.push_back(0.0);
      out.stages.push_back(rec);
      continue;
    }
    std::vector<opt::Oracle> constraints;
    for (Index j = 1; j < k; ++j) {
      const Residual* level = &levels[static_cast<std::size_t>(j - 1)];
      const double bound = minima[static_cast<std::size_t>(j - 1)];
      constraints.push_back([level, bound](const RVector& y, RVector& g) { return (*level)(y, g) - bound; });
    }
    const opt::Oracle objective = levels[static_cast<std::size_t>(k - 1)].oracle();
    const opt::EllipsoidResult er = opt::ellipsoid(objective, constraints, x, radius, opts.max_iter,
                                                   1e-3 * out.stage_tol, out.stage_tol);
    RVector g;
    const double start_value = objective(x, g);
    if (er.feasible && er.f <= start_value) x = er.x;
    rec.minimum = objective(x, g);
    rec.gap_bound = er.gap;
    rec.converged = er.converged;
    rec.active = active_count(svd(levels[0].at(x)).sigma, k);
    all_converged = all_converged && rec.converged;
    minima.push_back(rec.minimum);
    out.stages.push_back(rec);
  }

  out.coefficients = M.ortho_to_user(M.coords_from_params(x));
  out.Y = M.from_ortho(M.coords_from_params(x));
  out.R = A - out.Y;
  out.sigmaR = svd(out.R).sigma;
  const SpectrumBlocks blocks = spectrum_blocks(out.sigmaR, opts.group_tol);
  out.rho = blocks.values;
  out.multiplicities = blocks.multiplicities;
  out.converged = all_converged;
  return out;
}

LexOrder lex_compare(const RVector& a, const RVector& b, double lex_tol)
{
  require(a.size() == b.size(), "lexicographic comparison needs equal lengths");
  for (Index i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) <= lex_tol) continue;
    return a[i] < b[i] ? LexOrder::Less : LexOrder::Greater;
  }
  return LexOrder::Equal;
}

PkReport pk_singular_value_check(const CMatrix& A, const MatrixSubspace& M, double p, Index k, int trials,
                                 std::uint64_t seed, double gap_tol, int starts)
{
  const NormSpec spec = NormSpec::kyfan(p, k);
  const Index n0 = std::min(A.rows(), A.cols());
  spec.validate(n0);
  PkReport rep;
  auto gap_of = [&](const RVector& s) { return s[k - 1] - (k < s.size() ? s[k] : 0.0); };

  if (M.dim() == 0) {
    rep.sigmas.push_back(svd(A).sigma);
    rep.best_gap = gap_of(rep.sigmas.back());
    rep.status = PkStatus::Consistent;
    return rep;
  }
  for (int t = 0; t < trials; ++t) {
    ApproxOptions o;
    o.starts = starts;
    o.seed = seed + static_cast<std::uint64_t>(t);
    rep.sigmas.push_back(best_approx(A, M, spec, o).sigmaR);
    rep.best_gap = std::max(rep.best_gap, gap_of(rep.sigmas.back()));
  }
  if (rep.best_gap <= gap_tol) {
    rep.status = PkStatus::NotApplicable;
    return rep;
  }
  for (const RVector& s : rep.sigmas)
    for (const RVector& r : rep.sigmas)
      rep.max_deviation = std::max(rep.max_deviation, (s.head(k) - r.head(k)).cwiseAbs().maxCoeff());
  rep.status = rep.max_deviation <= 1e-6 ? PkStatus::Consistent : PkStatus::Inconsistent;
  return rep;
}

const char* to_string(LexOrder o)
{
  switch (o) {
  case LexOrder::Less: return "Less";
  case LexOrder::Equal: return "Equal";
  case LexOrder::Greater: return "Greater";
  }
  return "?";
}

const char* to_string(PkStatus s)
{
  switch (s) {
  case PkStatus::Consistent: return "Consistent";
  case PkStatus::Inconsistent: return "Inconsistent";
  case PkStatus::NotApplicable: return "NotApplicable";
  }
  return "?";
}

} // namespace kyfan
