#include "kyfan/ortho.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kyfan {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PeriodicMax {
  double angle = 0.0;
  double value = 0.0;
};

/// Global maximum of a smooth 2*pi-periodic function: a 360-point scan followed by
/// golden-section refinement around the three best local maxima of the scan.
template <class Fn>
PeriodicMax maximize_periodic(Fn&& fn)
{
  constexpr int grid = 360;
  const double h = kTwoPi / grid;
  std::vector<double> vals(grid);
  for (int i = 0; i < grid; ++i) vals[i] = fn(i * h);

  std::vector<int> peaks;
  for (int i = 0; i < grid; ++i) {
    const double prev = vals[(i + grid - 1) % grid];
    const double next = vals[(i + 1) % grid];
    if (vals[i] >= prev && vals[i] >= next) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vals[a] > vals[b]; });
  if (peaks.size() > 3) peaks.resize(3);

  PeriodicMax best{0.0, vals[0]};
  for (int i = 0; i < grid; ++i)
    if (vals[i] > best.value) best = {i * h, vals[i]};

  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int pk : peaks) {
    double a = (pk - 1) * h;
    double b = (pk + 1) * h;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int it = 0; it < 80; ++it) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - phi * (b - a);
        fc = fn(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + phi * (b - a);
        fd = fn(d);
      }
    }
    const double t = fc >= fd ? c : d;
    const double v = std::max(fc, fd);
    if (v > best.value) best = {t, v};
  }
  best.angle = std::fmod(best.angle + kTwoPi, kTwoPi);
  return best;
}

/// Supporting point of T in direction e^{i theta} and the support value.
struct Support {
  double value;
  cplx point;
};

Support support(const InnerRange& ir, double theta)
{
  const cplx rot = std::polar(1.0, -theta);
  CMatrix omega;
  const double s = top_eigen_sum(rot * ir.compressed, ir.required, &omega);
  return {(rot * ir.fixed).real() + s, ir.at(omega)};
}

CMatrix thin_q(const CMatrix& X)
{
  Eigen::HouseholderQR<CMatrix> qr(X);
  CMatrix Q = qr.householderQ() * CMatrix::Identity(X.rows(), X.cols());
  const CMatrix R = qr.matrixQR().topRows(X.cols()).triangularView<Eigen::Upper>();
  for (Index j = 0; j < X.cols(); ++j) {
    const cplx d = R(j, j);
    if (std::abs(d) > 0.0) Q.col(j) *= d / std::abs(d);
  }
  return Q;
}

bool is_zero(const CMatrix& A) { return A.size() == 0 || max_abs(A) == 0.0; }

} // namespace

cplx InnerRange::at(const CMatrix& omega) const
{
  if (required == 0 || compressed.size() == 0) return fixed;
  return fixed + (omega.adjoint() * compressed * omega).trace();
}

InnerRange inner_range(const CMatrix& A, const CMatrix& B, double p, Index k, int samples, std::uint64_t seed,
                       double group_tol)
{
  require(A.rows() == B.rows() && A.cols() == B.cols(), "A and B must have the same shape");
  if (is_zero(A)) fail(ErrorCode::InvalidInput, "inner range is undefined at A = 0");
  require_finite(B, "B");
  const SubdiffDescriptor desc = descriptor(A, p, k, group_tol);

  InnerRange ir;
  ir.rank_deficient = desc.rank_deficient;
  const CMatrix W = desc.prefactor.adjoint() * B;
  ir.fixed = (desc.fixed_basis.adjoint() * W * desc.fixed_basis).trace();
  ir.singleton = desc.singleton();
  if (!ir.singleton) {
    const CMatrix& VB = desc.boundary->basis;
    ir.compressed = VB.adjoint() * W * VB;
    ir.required = desc.boundary->required;
  }

  if (ir.singleton) {
    ir.min_abs = ir.max_abs = std::abs(ir.fixed);
    ir.nearest = ir.farthest = ir.fixed;
    ir.nearest_angle = ir.farthest_angle = std::arg(ir.fixed);
    ir.re_min = ir.re_max = ir.fixed.real();
    ir.samples.assign(static_cast<std::size_t>(std::max(samples, 0)), ir.fixed);
    if (ir.min_abs > 0.0) ir.nearest_angle = std::arg(-ir.fixed);
    return ir;
  }

  const PeriodicMax far = maximize_periodic([&](double t) { return support(ir, t).value; });
  const Support far_pt = support(ir, far.angle);
  ir.farthest_angle = far.angle;
  ir.farthest = far_pt.point;
  ir.max_abs = std::max(far.value, std::abs(far_pt.point));

  const PeriodicMax near = maximize_periodic([&](double t) { return -support(ir, t).value; });
  ir.nearest_angle = near.angle;
  if (near.value > 0.0) {
    ir.min_abs = near.value;
    ir.nearest = -near.value * std::polar(1.0, near.angle);
  } else {
    ir.min_abs = 0.0;
    ir.nearest = 0.0;
  }

  const CMatrix H = (ir.compressed + ir.compressed.adjoint()) * 0.5;
  ir.re_max = ir.fixed.real() + top_eigen_sum(H, ir.required);
  ir.re_min = ir.fixed.real() - top_eigen_sum(-H, ir.required);

  Rng rng(seed);
  for (int s = 0; s < samples; ++s)
    ir.samples.push_back(ir.at(haar_isometry(ir.compressed.rows(), ir.required, rng)));
  return ir;
}

namespace {

/// Riemannian gradient descent of |t(omega)|^2 on the Stiefel manifold, from several starts.
CMatrix zero_point_basis(const InnerRange& ir, std::uint64_t seed, double* residual)
{
  const CMatrix& C = ir.compressed;
  const Index d = C.rows();
  const Index r = ir.required;
  Rng rng(seed);
  CMatrix best = CMatrix::Identity(d, r);
  double best_abs = std::abs(ir.at(best));
  for (int start = 0; start < 8 && best_abs > 1e-14; ++start) {
    CMatrix omega = start == 0 ? CMatrix(CMatrix::Identity(d, r)) : haar_isometry(d, r, rng);
    double cur = std::norm(ir.at(omega));
    for (int it = 0; it < 2000 && std::sqrt(cur) > 1e-14; ++it) {
      const cplx t = ir.at(omega);
      const CMatrix G = 2.0 * (std::conj(t) * C * omega + t * C.adjoint() * omega);
      const CMatrix xi = G - omega * ((omega.adjoint() * G + G.adjoint() * omega) * 0.5);
      const double xx = xi.squaredNorm();
      if (xx == 0.0) break;
      double eta = cur / xx;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls, eta *= 0.5) {
        const CMatrix cand = thin_q(omega - eta * xi);
        const double val = std::norm(ir.at(cand));
        if (val < cur) {
          omega = cand;
          cur = val;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    if (std::sqrt(cur) < best_abs) {
      best_abs = std::sqrt(cur);
      best = omega;
    }
  }
  *residual = best_abs;
  return best;
}

} // namespace

BjResult check_bj(const CMatrix& A, const CMatrix& B, double p, Index k, double tol)
{
  BjResult res;
  const InnerRange ir = inner_range(A, B, p, k, 0);
  const SubdiffDescriptor desc = descriptor(A, p, k);
  const NormSpec spec = NormSpec::kyfan(p, k);
  res.norm_a = norm(A, spec);
  res.min_abs = ir.min_abs;
  res.rank_deficient = ir.rank_deficient;
  res.orthogonal = ir.min_abs <= tol;

  if (res.orthogonal) {
    CMatrix basis = desc.fixed_basis;
    if (desc.boundary) {
      CMatrix omega = CMatrix::Identity(desc.boundary->dim, desc.boundary->required);
      double residual = std::abs(ir.fixed);
      if (!ir.singleton) omega = zero_point_basis(ir, 7, &residual);
      res.witness_residual = residual;
      CMatrix full(basis.rows(), basis.cols() + omega.cols());
      full << basis, desc.boundary->basis * omega;
      basis = full;
    } else {
      res.witness_residual = std::abs(ir.fixed);
    }
    res.witness_basis = basis;
    return res;
  }

  const double nb = norm(B, spec);
  const cplx dir = std::polar(1.0, -ir.nearest_angle);
  auto along = [&](double s) { return norm(A + (s * dir) * B, spec); };
  double a = 0.0;
  double b = 2.0 * res.norm_a / nb;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = along(c);
  double fd = along(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * (res.norm_a / nb); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = along(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = along(d);
    }
  }
  const double s = fc <= fd ? c : d;
  res.refuting_lambda = s * dir;
  res.refuted_norm = std::min(fc, fd);
  return res;
}

EpsBjResult check_eps_bj(const CMatrix& A, const CMatrix& B, double p, Index k, double eps, EpsMode mode,
                         double tol)
{
  if (!(eps >= 0.0 && eps < 1.0)) fail(ErrorCode::InvalidInput, "eps must lie in [0, 1)");
  const InnerRange ir = inner_range(A, B, p, k, 0);
  EpsBjResult res;
  res.threshold = eps * norm(B, NormSpec::kyfan(p, k));
  cplx nearest;
  if (mode == EpsMode::Complex) {
    res.distance = ir.min_abs;
    nearest = ir.nearest;
  } else {
    const double t = std::clamp(0.0, ir.re_min, ir.re_max);
    res.distance = std::abs(t);
    nearest = t;
  }
  res.orthogonal = res.distance <= res.threshold + tol;
  if (res.orthogonal && res.threshold > 0.0) res.z0 = -nearest / res.threshold;
  return res;
}

ParallelResult check_parallel(const CMatrix& A, const CMatrix& B, double p, Index k, double tol)
{
  if (is_zero(B)) fail(ErrorCode::InvalidInput, "parallelism needs B != 0");
  const InnerRange ir = inner_range(A, B, p, k, 0);
  const NormSpec spec = NormSpec::kyfan(p, k);
  ParallelResult res;
  res.rank_deficient = ir.rank_deficient;
  res.max_abs = ir.max_abs;
  res.norm_b = norm(B, spec);
  res.parallel = ir.max_abs >= res.norm_b - tol;
  if (std::abs(ir.farthest) > 0.0) res.lambda = std::conj(ir.farthest) / std::abs(ir.farthest);
  res.additivity_defect = norm(A, spec) + res.norm_b - norm(A + res.lambda * B, spec);
  return res;
}

CMatrix project_fantope(const CMatrix& X, Index r)
{
  const Index d = X.rows();
  require(r >= 0 && r <= d, "Fantope rank out of range");
  if (r == d) return CMatrix::Identity(d, d);
  if (r == 0) return CMatrix::Zero(d, d);
  const HermEigen e = herm_eig((X + X.adjoint()) * 0.5);
  auto mass = [&](double theta) {
    double s = 0.0;
    for (Index i = 0; i < d; ++i) s += std::clamp(e.values[i] - theta, 0.0, 1.0);
    return s;
  };
  double lo = e.values[d - 1] - 1.0; // mass(lo) = d >= r
  double hi = e.values[0];           // mass(hi) = 0 <= r
  for (int it = 0; it < 200 && hi - lo > 1e-17 * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) > static_cast<double>(r) ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  RVector w(d);
  for (Index i = 0; i < d; ++i) w[i] = std::clamp(e.values[i] - theta, 0.0, 1.0);
  // the bisection leaves a tiny trace error; spread it over the fractional eigenvalues
  const double err = static_cast<double>(r) - w.sum();
  Index free = 0;
  for (Index i = 0; i < d; ++i) free += (w[i] > 0.0 && w[i] < 1.0) ? 1 : 0;
  if (free > 0)
    for (Index i = 0; i < d; ++i)
      if (w[i] > 0.0 && w[i] < 1.0) w[i] += err / static_cast<double>(free);
  return e.vectors * w.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

FantopeSolve fantope_feasibility(Index d, Index r, const std::vector<CMatrix>& H, const std::vector<double>& rhs,
                                 int max_iter, double residual_tol)
{
  require(H.size() == rhs.size(), "constraint count mismatch");
  const Index L = static_cast<Index>(H.size());
  FantopeSolve out;
  out.S = CMatrix::Identity(d, d) * (static_cast<double>(r) / static_cast<double>(d));

  auto residual_vec = [&](const CMatrix& S) {
    RVector v(L);
    for (Index l = 0; l < L; ++l) v[l] = (H[static_cast<std::size_t>(l)] * S).trace().real() - rhs[static_cast<std::size_t>(l)];
    return v;
  };
  out.residual = residual_vec(out.S).norm();
  if (L == 0 || out.residual <= residual_tol) return out;

  RMatrix gram(L, L);
  for (Index a = 0; a < L; ++a)
    for (Index b = 0; b < L; ++b)
      gram(a, b) = (H[static_cast<std::size_t>(a)] * H[static_cast<std::size_t>(b)]).trace().real();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(gram);
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  RVector inv(L);
  for (Index i = 0; i < L; ++i) {
    const double lam = es.eigenvalues()[i];
    inv[i] = lam > 1e-12 * top ? 1.0 / lam : 0.0;
  }
  const RMatrix pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
  auto project_affine = [&](const CMatrix& X) {
    const RVector mu = pinv * residual_vec(X);
    CMatrix Y = X;
    for (Index l = 0; l < L; ++l) Y -= mu[l] * H[static_cast<std::size_t>(l)];
    return Y;
  };

  CMatrix x = out.S;
  CMatrix pcorr = CMatrix::Zero(d, d);
  CMatrix qcorr = CMatrix::Zero(d, d);
  double checkpoint = out.residual;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    const CMatrix y = project_fantope(x + pcorr, r);
    pcorr = x + pcorr - y;
    const double res = residual_vec(y).norm();
    if (res < out.residual) {
      out.residual = res;
      out.S = y;
    }
    if (res <= residual_tol) break;
    const CMatrix z = y + qcorr;
    x = project_affine(z);
    qcorr = z - x;
    if (it % 1000 == 0) {
      // give up once a thousand sweeps gain less than one percent
      if (out.residual > 0.99 * checkpoint) break;
      checkpoint = out.residual;
    }
  }
  return out;
}

CertificateOutcome subspace_certificate(const CMatrix& A, const MatrixSubspace& M, double p, Index k,
                                        const CertificateOptions& opts)
{
  M.check_shape(A, "matrix");
  if (is_zero(A)) fail(ErrorCode::InvalidInput, "certificates need A != 0");
  const SubdiffDescriptor desc = descriptor(A, p, k, opts.group_tol);

  const CMatrix fixed = desc.fixed_part();
  std::vector<CMatrix> H;
  std::vector<double> rhs;
  const bool free_block = desc.boundary.has_value();
  for (const CMatrix& Q : M.orthonormal()) {
    const cplx b = inner(fixed, Q);
    CMatrix E;
    if (free_block) {
      const CMatrix& VB = desc.boundary->basis;
      E = VB.adjoint() * Q.adjoint() * desc.prefactor * VB;
    }
    auto push = [&](const CMatrix& Hl, double value) {
      if (free_block) H.push_back(Hl);
      rhs.push_back(value);
    };
    push(free_block ? CMatrix((E + E.adjoint()) * 0.5) : CMatrix(), -b.real());
    if (M.field() == Field::Complex) push(free_block ? CMatrix((E - E.adjoint()) * cplx(0.0, -0.5)) : CMatrix(), -b.imag());
  }

  CertificateOutcome out;
  DensityCertificate& cert = out.certificate;
  cert.group_tol = opts.group_tol;
  CMatrix S;
  if (free_block) {
    const FantopeSolve fs = fantope_feasibility(desc.boundary->dim, desc.boundary->required, H, rhs, opts.max_iter,
                                                opts.residual_tol);
    S = fs.S;
    cert.iterations = fs.iterations;
  }

  CMatrix total = desc.fixed_basis * desc.fixed_basis.adjoint();
  for (Index j : desc.full_blocks) {
    const Index start = desc.blocks.start(j);
    const Index mult = desc.blocks.multiplicities[static_cast<std::size_t>(j)];
    const CMatrix Vj = desc.fixed_basis.middleCols(start, mult);
    const CMatrix Tj = Vj * Vj.adjoint() / static_cast<double>(mult);
    for (Index i = 0; i < mult; ++i) cert.T.push_back(Tj);
  }
  if (free_block) {
    const CMatrix& VB = desc.boundary->basis;
    const CMatrix P = VB * S * VB.adjoint();
    total += P;
    for (Index i = 0; i < desc.boundary->required; ++i)
      cert.T.push_back(P / static_cast<double>(desc.boundary->required));
  }

  cert.F = desc.prefactor * total;
  cert.residual_perp = M.dim() == 0 ? 0.0 : project_subspace(cert.F, M).onto.norm();
  const CMatrix gram = A.adjoint() * A;
  for (Index i = 0; i < k; ++i) {
    const double s2 = desc.sigma[i] * desc.sigma[i];
    const CMatrix& Ti = cert.T[static_cast<std::size_t>(i)];
    cert.residual_eig = std::max(cert.residual_eig, (gram * Ti - s2 * Ti).norm());
  }
  cert.dual_norm_bound = dual_norm(cert.F, NormSpec::kyfan(p, k));
  out.feasible = cert.residual_eig <= opts.tol && cert.residual_perp <= opts.tol &&
                 cert.dual_norm_bound <= 1.0 + opts.tol;
  return out;
}

CertificateCheck verify_certificate(const CMatrix& A, const MatrixSubspace& M, double p, Index k,
                                    const DensityCertificate& cert, double tol, std::uint64_t seed)
{
  M.check_shape(A, "matrix");
  CertificateCheck chk;
  const Index n = A.cols();
  if (static_cast<Index>(cert.T.size()) != k || is_zero(A)) return chk;

  const SubdiffDescriptor desc = descriptor(A, p, k, cert.group_tol);
  const CMatrix gram = A.adjoint() * A;
  chk.trace_ok = true;
  chk.psd_ok = true;
  CMatrix total = CMatrix::Zero(n, n);
  for (Index i = 0; i < k; ++i) {
    const CMatrix& T = cert.T[static_cast<std::size_t>(i)];
    if (T.rows() != n || T.cols() != n) return chk;
    const cplx tr = T.trace();
    chk.trace_ok = chk.trace_ok && std::abs(tr - 1.0) <= 1e-10;
    const double herm_err = max_abs(T - T.adjoint());
    if (herm_err > 1e-10) {
      chk.psd_ok = false;
    } else {
      const RVector ev = herm_eig((T + T.adjoint()) * 0.5).values;
      chk.psd_ok = chk.psd_ok && ev[n - 1] >= -1e-10;
    }
    const double s2 = desc.sigma[i] * desc.sigma[i];
    chk.residual_eig = std::max(chk.residual_eig, (gram * T - s2 * T).norm());
    total += T;
  }
  chk.eig_ok = chk.residual_eig <= tol;

  const CMatrix F = desc.prefactor * total;
  chk.residual_perp = M.dim() == 0 ? 0.0 : project_subspace(F, M).onto.norm();
  chk.perp_ok = chk.residual_perp <= tol;
  const NormSpec spec = NormSpec::kyfan(p, k);
  chk.dual_norm_bound = dual_norm(F, spec);
  chk.dual_ok = chk.dual_norm_bound <= 1.0 + tol;

  const double base = norm(A, spec);
  chk.worst_sampled_excess = 0.0;
  if (M.dim() > 0) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> expo(-3.0, 0.5);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 20; ++t) {
      RVector x(M.real_dim());
      for (Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
      CMatrix B = M.from_ortho(M.coords_from_params(x));
      B *= base * std::pow(10.0, expo(rng)) / std::max(B.norm(), 1e-300);
      worst = std::min(worst, norm(A + B, spec) - base);
    }
    chk.worst_sampled_excess = worst;
  }
  chk.sampled_ok = chk.worst_sampled_excess >= -1e-9 * std::max(1.0, base);
  chk.accepted = chk.trace_ok && chk.psd_ok && chk.eig_ok && chk.perp_ok && chk.dual_ok && chk.sampled_ok;
  return chk;
}

} // namespace kyfan
