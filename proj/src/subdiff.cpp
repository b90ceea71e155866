#include "kyfan/subdiff.hpp"

#include <algorithm>
#include <cmath>

namespace kyfan {

bool SubdiffDescriptor::singleton() const
{
  if (kind == SubdiffKind::DualUnitBall) return false;
  if (!boundary) return true;
  // the zero block is annihilated by the prefactor
  return boundary->value <= kSigmaClamp * std::max(sigma[0], 1e-300);
}

CMatrix SubdiffDescriptor::fixed_part() const { return prefactor * fixed_basis * fixed_basis.adjoint(); }

CMatrix SubdiffDescriptor::extreme_point(const CMatrix& omega) const
{
  CMatrix G = fixed_part();
  if (boundary) {
    require(omega.rows() == boundary->dim && omega.cols() == boundary->required,
            "boundary isometry has the wrong shape");
    const CMatrix W = boundary->basis * omega;
    G += prefactor * W * W.adjoint();
  }
  return G;
}

CMatrix SubdiffDescriptor::canonical_point() const
{
  if (!boundary) return fixed_part();
  return extreme_point(CMatrix::Identity(boundary->dim, boundary->required));
}

CMatrix fv_gradient(const CMatrix& A, const CMatrix& V, double p)
{
  if (!(p > 2.0)) fail(ErrorCode::Unsupported, "fv_gradient is defined for p > 2");
  require_finite(A, "fv_gradient matrix");
  require(V.rows() == A.cols() && V.cols() >= 1, "V must be n x k with k >= 1");
  require(max_abs(V.adjoint() * V - CMatrix::Identity(V.cols(), V.cols())) <= 1e-8,
          "columns of V must be orthonormal");

  const CMatrix gram = A.adjoint() * A;
  const double scale = std::max(max_abs(gram), 1.0);
  for (Index i = 0; i < V.cols(); ++i) {
    const CVector v = V.col(i);
    const cplx rq = v.dot(gram * v);
    if ((gram * v - rq * v).norm() > 1e-8 * scale)
      fail(ErrorCode::InvalidInput, "column " + std::to_string(i) + " of V is not an eigenvector of A^*A");
  }
  return p * A * V * V.adjoint() * psd_power(gram, (p - 2.0) / 2.0);
}

SubdiffDescriptor descriptor(const CMatrix& A, double p, Index k, double tol)
{
  if (!(p >= 2.0) || !std::isfinite(p)) fail(ErrorCode::Unsupported, "subdifferential formula needs 2 <= p < inf");
  require_finite(A, "descriptor matrix");
  const Index m = A.rows();
  const Index n = A.cols();
  const Index n0 = std::min(m, n);
  require(k >= 1 && k <= n0, "descriptor needs 1 <= k <= min(m, n)");

  SubdiffDescriptor d;
  d.p = p;
  d.k = k;
  d.rows = m;
  d.cols = n;

  const SvdFactors f = svd(A, true);
  d.sigma = RVector::Zero(n);
  d.sigma.head(n0) = f.sigma;
  if (f.sigma[0] <= 0.0) {
    d.kind = SubdiffKind::DualUnitBall;
    d.prefactor = CMatrix::Zero(m, n);
    d.fixed_basis = CMatrix::Zero(n, 0);
    d.rank_deficient = true;
    return d;
  }

  const double floor = kSigmaClamp * f.sigma[0];
  for (Index i = 0; i < n0; ++i)
    if (d.sigma[i] <= floor) d.sigma[i] = 0.0;

  d.norm_value = kyfan_value(d.sigma, p, k);
  d.prefactor = CMatrix::Zero(m, n);
  for (Index i = 0; i < n0; ++i) {
    if (d.sigma[i] == 0.0) continue;
    d.prefactor += std::pow(d.sigma[i] / d.norm_value, p - 1.0) * f.left.col(i) * f.right.col(i).adjoint();
  }
  d.rank_deficient = d.sigma[k - 1] == 0.0;

  d.blocks = spectrum_blocks(d.sigma, tol);
  const Index jb = d.blocks.block_of(k - 1);
  for (Index j = 0; j < jb; ++j) d.full_blocks.push_back(j);
  if (d.blocks.cumulative[jb] == k) {
    d.full_blocks.push_back(jb);
    d.fixed_basis = f.right.leftCols(k);
  } else {
    BoundaryBlock b;
    b.start = d.blocks.start(jb);
    b.dim = d.blocks.multiplicities[jb];
    b.required = k - b.start;
    b.value = d.blocks.values[jb];
    b.basis = f.right.middleCols(b.start, b.dim);
    d.fixed_basis = f.right.leftCols(b.start);
    d.boundary = std::move(b);
  }
  return d;
}

SubdiffDescriptor descriptor(const CMatrix& A, const NormSpec& spec, double tol)
{
  const Index n0 = std::min(A.rows(), A.cols());
  spec.validate(n0);
  return descriptor(A, spec.p(), spec.k_for(n0), tol);
}

CMatrix sample_extreme(const SubdiffDescriptor& desc, std::uint64_t seed)
{
  Rng rng(seed);
  if (desc.kind == SubdiffKind::DualUnitBall) {
    // a point on the dual unit sphere; every such point is a subgradient at 0
    const CMatrix G = random_complex(desc.rows, desc.cols, rng);
    return G / dual_norm(G, NormSpec::kyfan(desc.p, desc.k));
  }
  if (!desc.boundary) return desc.fixed_part();
  return desc.extreme_point(haar_isometry(desc.boundary->dim, desc.boundary->required, rng));
}

bool membership(const CMatrix& A, double p, Index k, const CMatrix& G, double tol)
{
  require(A.rows() == G.rows() && A.cols() == G.cols(), "membership needs matching shapes");
  const NormSpec spec = NormSpec::kyfan(p, k);
  const double value = norm(A, spec);
  return real_pairing(G, A) >= value - tol && dual_norm(G, spec) <= 1.0 + tol;
}

double top_eigen_sum(const CMatrix& H, Index r, CMatrix* vectors)
{
  const HermEigen e = herm_eig((H + H.adjoint()) * 0.5);
  if (vectors) *vectors = e.vectors.leftCols(r);
  return e.values.head(r).sum();
}

double dir_derivative(const CMatrix& A, const CMatrix& X, double p, Index k, double tol)
{
  require(A.rows() == X.rows() && A.cols() == X.cols(), "direction must match the matrix shape");
  const SubdiffDescriptor d = descriptor(A, p, k, tol);
  if (d.kind == SubdiffKind::DualUnitBall) return norm(X, NormSpec::kyfan(p, k));

  double value = real_pairing(d.fixed_part(), X);
  if (d.boundary) {
    const CMatrix& VB = d.boundary->basis;
    const CMatrix C = VB.adjoint() * (X.adjoint() * d.prefactor + d.prefactor.adjoint() * X) * VB * 0.5;
    value += top_eigen_sum(C, d.boundary->required);
  }
  return value;
}

double schatten_norm(const CMatrix& A, double q)
{
  return kyfan_value(svd(A).sigma, q, std::min(A.rows(), A.cols()));
}

} // namespace kyfan
