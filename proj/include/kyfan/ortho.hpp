#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kyfan/matrix.hpp"
#include "kyfan/subdiff.hpp"
#include "kyfan/subspace.hpp"

namespace kyfan {

/// The set T = { Re-linear image tr(G^* B) : G in the subdifferential of ||.||_(p,k) at A }.
/// T = fixed + { tr(C S) : S in the rank-r Fantope of the boundary block }, a compact
/// convex set, so its distance to 0 and its farthest point are read off the support
/// function h(theta) = Re(e^{-i theta} fixed) + (top-r eigenvalue sum of Herm(e^{-i theta} C)).
struct InnerRange {
  cplx fixed{0.0, 0.0};
  CMatrix compressed;   // C = V_B^* prefactor^* B V_B, empty without a boundary block
  Index required = 0;   // r
  std::vector<cplx> samples;
  double min_abs = 0.0; // distance from 0 to T
  double max_abs = 0.0;
  cplx nearest{0.0, 0.0};  // a point of T closest to 0
  cplx farthest{0.0, 0.0}; // a point of T of largest modulus
  double nearest_angle = 0.0;  // theta maximizing -h
  double farthest_angle = 0.0; // theta maximizing h
  bool singleton = true;
  bool rank_deficient = false;

  /// Real parts of T form the interval [re_min, re_max].
  double re_min = 0.0;
  double re_max = 0.0;

  /// Value at a particular d x r isometry of the boundary block.
  cplx at(const CMatrix& omega) const;
};

InnerRange inner_range(const CMatrix& A, const CMatrix& B, double p, Index k, int samples = 16,
                       std::uint64_t seed = 42, double group_tol = kGroupingTol);

struct BjResult {
  bool orthogonal = false;
  double min_abs = 0.0;
  double norm_a = 0.0;
  /// n x k orthonormal columns v_i with sum <(A^*A)^((p-2)/2) A^* B v_i, v_i> = 0 (when orthogonal).
  std::optional<CMatrix> witness_basis;
  double witness_residual = 0.0;
  /// lambda with ||A + lambda B|| < ||A|| (when not orthogonal), found by a line search.
  std::optional<cplx> refuting_lambda;
  double refuted_norm = 0.0;
  bool rank_deficient = false;
};

BjResult check_bj(const CMatrix& A, const CMatrix& B, double p, Index k, double tol = 1e-8);

enum class EpsMode { Complex, Real };

struct EpsBjResult {
  bool orthogonal = false;
  double distance = 0.0;  // min |t| (complex) or min |Re t| (real)
  double threshold = 0.0; // eps * ||B||_(p,k)
  /// z0 (complex) or t0 (real) with t + z0 eps ||B|| = 0, reported when eps > 0 and orthogonal.
  std::optional<cplx> z0;
};

EpsBjResult check_eps_bj(const CMatrix& A, const CMatrix& B, double p, Index k, double eps, EpsMode mode,
                         double tol = 1e-8);

struct ParallelResult {
  bool parallel = false;
  double max_abs = 0.0;
  double norm_b = 0.0;
  cplx lambda{1.0, 0.0}; // unimodular
  double additivity_defect = 0.0; // ||A|| + ||B|| - ||A + lambda B||
  bool rank_deficient = false;
};

ParallelResult check_parallel(const CMatrix& A, const CMatrix& B, double p, Index k, double tol = 1e-8);

/// k density matrices T_i supported in the sigma_i^2 eigenspaces of A^*A such that
/// prefactor * sum T_i is orthogonal to the subspace.
struct DensityCertificate {
  std::vector<CMatrix> T;
  double residual_eig = 0.0;
  double residual_perp = 0.0;
  double dual_norm_bound = 0.0;
  CMatrix F; // prefactor * sum T_i
  int iterations = 0;
  double group_tol = kGroupingTol;
};

struct CertificateOutcome {
  bool feasible = false;
  DensityCertificate certificate; // final iterate, also reported when infeasible
};

struct CertificateOptions {
  double tol = 1e-8;
  int max_iter = 5000;
  double residual_tol = 1e-9;
  double group_tol = kGroupingTol;
};

CertificateOutcome subspace_certificate(const CMatrix& A, const MatrixSubspace& M, double p, Index k,
                                        const CertificateOptions& opts = {});

struct CertificateCheck {
  bool accepted = false;
  bool trace_ok = false;
  bool psd_ok = false;
  bool eig_ok = false;
  bool perp_ok = false;
  bool dual_ok = false;
  bool sampled_ok = false;
  double residual_eig = 0.0;
  double residual_perp = 0.0;
  double dual_norm_bound = 0.0;
  double worst_sampled_excess = 0.0; // min over sampled B of ||A + B|| - ||A||
};

CertificateCheck verify_certificate(const CMatrix& A, const MatrixSubspace& M, double p, Index k,
                                    const DensityCertificate& cert, double tol = 1e-8, std::uint64_t seed = 42);

/// Finds S with 0 <= S <= I, tr S = r, and tr(H_l S) = rhs_l by Dykstra's alternating
/// projections.  Returns the last Fantope iterate and its affine residual.
struct FantopeSolve {
  CMatrix S;
  double residual = 0.0;
  int iterations = 0;
};

FantopeSolve fantope_feasibility(Index d, Index r, const std::vector<CMatrix>& H, const std::vector<double>& rhs,
                                 int max_iter, double residual_tol);

/// Euclidean projection of a Hermitian matrix onto { 0 <= S <= I, tr S = r }.
CMatrix project_fantope(const CMatrix& X, Index r);

} // namespace kyfan
