#pragma once

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "kyfan/error.hpp"

namespace kyfan {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Singular values at or below this fraction of sigma_1 are treated as exact zeros
/// whenever they are raised to a power.
inline constexpr double kSigmaClamp = 1e-14;

/// Default relative tolerance for merging singular values into one block.
inline constexpr double kGroupingTol = 1e-8;

/// Thin SVD: A = left * diag(sigma) * right^*, sigma non-increasing.
/// With `full_right` the right factor is completed to an n x n unitary whose
/// trailing columns span the null space of A beyond the min(m, n) singular vectors.
struct SvdFactors {
  CMatrix left;
  RVector sigma;
  CMatrix right;

  CMatrix reconstruct() const;
};

SvdFactors svd(const CMatrix& A, bool full_right = false);

/// Hermitian eigendecomposition with eigenvalues sorted non-increasing.
struct HermEigen {
  RVector values;
  CMatrix vectors;
};

HermEigen herm_eig(const CMatrix& H);

/// U diag(lambda_i^s) U^* for a positive semidefinite H.  For s = 0 the result is the
/// orthogonal projection onto range(H), not the identity.
CMatrix psd_power(const CMatrix& H, double s);

/// Consecutive runs of (nearly) equal singular values.
struct SpectrumBlocks {
  std::vector<double> values;       // rho_1 > rho_2 > ...
  std::vector<Index> multiplicities; // s_j
  std::vector<Index> cumulative;    // t_j = s_1 + ... + s_j
  double tolerance = kGroupingTol;

  Index count() const { return static_cast<Index>(values.size()); }
  Index start(Index j) const { return j == 0 ? 0 : cumulative[j - 1]; }
  /// Block containing the 0-based position i.
  Index block_of(Index i) const;
};

/// Merges neighbours whose gap is within tol * max(sigma_1, 1); a block's value is the
/// mean of its members.
SpectrumBlocks spectrum_blocks(const RVector& sigma, double tol = kGroupingTol);

// Small helpers shared by every module.

bool all_finite(const CMatrix& A);
void require_finite(const CMatrix& A, const char* what);
double max_abs(const CMatrix& A);

/// Complex Frobenius inner product <X, B> = tr(B^* X).
inline cplx inner(const CMatrix& X, const CMatrix& B) { return (B.adjoint() * X).trace(); }

/// Re tr(G^* X), the real pairing used by subgradients.
inline double real_pairing(const CMatrix& G, const CMatrix& X) { return (G.conjugate().cwiseProduct(X)).sum().real(); }

CMatrix diag_matrix(const std::vector<cplx>& d);
CMatrix diag_matrix(std::initializer_list<double> d);

/// Numerical rank with relative threshold on sigma_1.
Index numerical_rank(const CMatrix& A, double rel_tol = 1e-10);

/// Entries with independent standard complex normal real and imaginary parts.
CMatrix random_complex(Index rows, Index cols, Rng& rng);
CMatrix random_real(Index rows, Index cols, Rng& rng);

/// n x k matrix with Haar-distributed orthonormal columns.
CMatrix haar_isometry(Index n, Index k, Rng& rng);

/// Random Hermitian matrix (G + G^*)/2.
CMatrix random_hermitian(Index n, Rng& rng);

} // namespace kyfan
