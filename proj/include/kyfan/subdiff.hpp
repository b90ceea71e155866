#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kyfan/matrix.hpp"
#include "kyfan/norms.hpp"

namespace kyfan {

/// Singular-value block that straddles position k: any rank-`required` projector
/// inside its right-singular subspace completes a valid choice of v_1..v_k.
struct BoundaryBlock {
  Index start = 0;    // 0-based position of the block's first member
  Index dim = 0;      // d
  Index required = 0; // r = k - start
  double value = 0.0;
  CMatrix basis;      // n x d orthonormal right singular vectors
};

enum class SubdiffKind {
  ExtremeFamily, ///< A != 0: conv of prefactor * (fixed projector + Q)
  DualUnitBall,  ///< A == 0: every G with dual norm <= 1
};

/// Structural description of the subdifferential of ||.||_(p,k) at A for p >= 2.
///
/// The extreme points are prefactor * (P_fixed + Q) where
///   prefactor = A (A^*A)^((p-2)/2) / ||A||^(p-1),
///   P_fixed   = projector onto the blocks that lie entirely inside the top k,
///   Q         = any rank-r orthogonal projector inside the boundary block.
/// Blocks are computed on sigma padded with zeros to length n, so the zero block
/// carries the full null space of A.
struct SubdiffDescriptor {
  SubdiffKind kind = SubdiffKind::ExtremeFamily;
  double p = 2.0;
  Index k = 1;
  Index rows = 0;
  Index cols = 0;
  double norm_value = 0.0;
  CMatrix prefactor;
  RVector sigma; // padded to length n
  SpectrumBlocks blocks;
  std::vector<Index> full_blocks;
  CMatrix fixed_basis; // n x (k - r)
  std::optional<BoundaryBlock> boundary;
  bool rank_deficient = false; // some sigma_i, i <= k, is zero

  bool singleton() const;
  double q() const { return p / (p - 1.0); }
  CMatrix fixed_part() const;
  /// prefactor * (P_fixed + V_B omega omega^* V_B^*) for a d x r isometry omega.
  CMatrix extreme_point(const CMatrix& omega) const;
  /// The extreme point obtained from the SVD's own basis.
  CMatrix canonical_point() const;
};

/// Riesz representer of the derivative of X -> Re tr(V V^* (X^*X)^(p/2)) at A:
/// p * A V V^* (A^*A)^((p-2)/2).  Columns of V must be orthonormal eigenvectors of A^*A.
CMatrix fv_gradient(const CMatrix& A, const CMatrix& V, double p);

/// Throws Unsupported for p < 2.  A == 0 yields the DualUnitBall variant.
SubdiffDescriptor descriptor(const CMatrix& A, double p, Index k, double tol = kGroupingTol);
/// Spectral norm maps to its (2, 1) form.
SubdiffDescriptor descriptor(const CMatrix& A, const NormSpec& spec, double tol = kGroupingTol);

/// Extreme point with a Haar-random rank-r projector in the boundary block.
CMatrix sample_extreme(const SubdiffDescriptor& desc, std::uint64_t seed);

/// Re tr(G^* A) >= ||A|| - tol and dual_norm(G) <= 1 + tol.
bool membership(const CMatrix& A, double p, Index k, const CMatrix& G, double tol);

/// Right-hand directional derivative of ||.||_(p,k) at A along X.  The boundary block
/// freedom is maximized exactly by the top-r eigenvalue sum of the compressed
/// Hermitian part; at A == 0 the result is ||X||_(p,k).
double dir_derivative(const CMatrix& A, const CMatrix& X, double p, Index k, double tol = kGroupingTol);

/// Schatten-q norm, q >= 1.
double schatten_norm(const CMatrix& A, double q);

/// Sum of the r largest eigenvalues of a Hermitian matrix, with the maximizing vectors.
double top_eigen_sum(const CMatrix& H, Index r, CMatrix* vectors = nullptr);

} // namespace kyfan
