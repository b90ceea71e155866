#include "kyfan/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace kyfan {

CMatrix SvdFactors::reconstruct() const
{
  const Index r = sigma.size();
  return left.leftCols(r) * sigma.cast<cplx>().asDiagonal() * right.leftCols(r).adjoint();
}

SvdFactors svd(const CMatrix& A, bool full_right)
{
  require_finite(A, "svd input");
  require(A.rows() > 0 && A.cols() > 0, "svd of an empty matrix");
  const Index n0 = std::min(A.rows(), A.cols());

  SvdFactors out;
  if (full_right) {
    Eigen::JacobiSVD<CMatrix> dec(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    out.left = dec.matrixU().leftCols(n0);
    out.sigma = dec.singularValues();
    out.right = dec.matrixV();
  } else {
    Eigen::JacobiSVD<CMatrix> dec(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.left = dec.matrixU();
    out.sigma = dec.singularValues();
    out.right = dec.matrixV();
  }
  for (Index i = 0; i < out.sigma.size(); ++i) out.sigma[i] = std::max(0.0, out.sigma[i]);
  return out;
}

HermEigen herm_eig(const CMatrix& H)
{
  require_finite(H, "herm_eig input");
  require(H.rows() == H.cols(), "herm_eig needs a square matrix");
  const double scale = std::max(max_abs(H), std::numeric_limits<double>::min());
  require(max_abs(H - H.adjoint()) <= 1e-10 * scale, "herm_eig input is not Hermitian");

  const CMatrix sym = (H + H.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  const Index n = H.rows();
  HermEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) {
    out.values[i] = es.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

CMatrix psd_power(const CMatrix& H, double s)
{
  require(s >= 0.0 && std::isfinite(s), "psd_power exponent must be >= 0");
  const HermEigen eig = herm_eig(H);
  const double scale = std::max(max_abs(H), std::numeric_limits<double>::min());
  const Index n = H.rows();
  const double top = n > 0 ? std::max(eig.values[0], 0.0) : 0.0;
  RVector powered(n);
  for (Index i = 0; i < n; ++i) {
    const double lam = eig.values[i];
    if (lam < -1e-10 * scale) fail(ErrorCode::InvalidInput, "psd_power input has a negative eigenvalue");
    // rounding noise in the eigenvalues of a PSD matrix sits near 1e-16 * top
    if (lam <= 1e-12 * top || lam <= 0.0)
      powered[i] = 0.0;
    else
      powered[i] = s == 0.0 ? 1.0 : std::pow(lam, s);
  }
  return eig.vectors * powered.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

Index SpectrumBlocks::block_of(Index i) const
{
  for (Index j = 0; j < count(); ++j)
    if (i < cumulative[j]) return j;
  return count();
}

SpectrumBlocks spectrum_blocks(const RVector& sigma, double tol)
{
  SpectrumBlocks out;
  out.tolerance = tol;
  if (sigma.size() == 0) return out;
  const double thresh = tol * std::max(sigma[0], 1.0);

  double sum = sigma[0];
  Index run = 1;
  auto close_run = [&] {
    out.values.push_back(sum / static_cast<double>(run));
    out.multiplicities.push_back(run);
    out.cumulative.push_back((out.cumulative.empty() ? 0 : out.cumulative.back()) + run);
  };
  for (Index i = 1; i < sigma.size(); ++i) {
    if (std::abs(sigma[i - 1] - sigma[i]) <= thresh) {
      sum += sigma[i];
      ++run;
    } else {
      close_run();
      sum = sigma[i];
      run = 1;
    }
  }
  close_run();
  return out;
}

bool all_finite(const CMatrix& A)
{
  for (Index j = 0; j < A.cols(); ++j)
    for (Index i = 0; i < A.rows(); ++i)
      if (!std::isfinite(A(i, j).real()) || !std::isfinite(A(i, j).imag())) return false;
  return true;
}

void require_finite(const CMatrix& A, const char* what)
{
  if (!all_finite(A)) fail(ErrorCode::InvalidInput, std::string(what) + " has non-finite entries");
}

double max_abs(const CMatrix& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

CMatrix diag_matrix(const std::vector<cplx>& d)
{
  const Index n = static_cast<Index>(d.size());
  CMatrix out = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) out(i, i) = d[static_cast<std::size_t>(i)];
  return out;
}

CMatrix diag_matrix(std::initializer_list<double> d)
{
  std::vector<cplx> v(d.begin(), d.end());
  return diag_matrix(v);
}

Index numerical_rank(const CMatrix& A, double rel_tol)
{
  const RVector s = svd(A).sigma;
  if (s.size() == 0 || s[0] == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++r;
  return r;
}

CMatrix random_complex(Index rows, Index cols, Rng& rng)
{
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      out(i, j) = cplx(re, im);
    }
  return out;
}

CMatrix random_real(Index rows, Index cols, Rng& rng)
{
  std::normal_distribution<double> nd(0.0, 1.0);
  CMatrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = cplx(nd(rng), 0.0);
  return out;
}

CMatrix haar_isometry(Index n, Index k, Rng& rng)
{
  require(k <= n, "isometry needs k <= n");
  const CMatrix g = random_complex(n, k, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, k);
  const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  // fix the phase of diag(R) so the distribution is exactly Haar
  for (Index j = 0; j < k; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

CMatrix random_hermitian(Index n, Rng& rng)
{
  const CMatrix g = random_complex(n, n, rng);
  return (g + g.adjoint()) * 0.5;
}

} // namespace kyfan
