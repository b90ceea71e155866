#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kyfan/matrix.hpp"
#include "kyfan/norms.hpp"
#include "kyfan/ortho.hpp"
#include "kyfan/subspace.hpp"

namespace kyfan {

struct ApproxOptions {
  int starts = 50;
  int max_iter = 5000;
  double tol = 1e-10;
  std::uint64_t seed = 42;
  /// Warm start, given as coefficients in the user basis.
  std::optional<CVector> initial;
};

struct SolverTrace {
  int starts = 0;
  int iterations = 0;
  int evaluations = 0;
  double start_spread = 0.0;       ///< worst minus best value over the local solves
  std::vector<double> start_values; ///< local-solve values; the warm start, if any, comes first
  double gap_bound = 0.0;          ///< ellipsoid bound on value - min
};

struct ApproximationResult {
  CMatrix Y;
  CVector coefficients;       ///< in the user basis
  CVector ortho_coefficients; ///< in the orthonormalized basis
  CMatrix R;
  double value = 0.0;
  RVector sigmaR;
  std::optional<CMatrix> certificate;
  SolverTrace trace;
  bool converged = false;
};

/// Minimizes ||A - Y|| over Y in M.  Polyak subgradient steps from many starts feed a
/// BFGS refinement; a deep-cut ellipsoid pass over a ball known to contain every
/// minimizer supplies the convergence bound; Newton polishing sharpens smooth optima,
/// and very small subspaces also get a stencil pattern search.
ApproximationResult best_approx(const CMatrix& A, const MatrixSubspace& M, const NormSpec& spec,
                                const ApproxOptions& opts = {});

struct CertifyOutcome {
  bool certified = false;
  bool trivial = false; ///< R = 0, nothing to certify
  std::optional<CMatrix> F;
  DensityCertificate certificate;
  double residual_perp = 0.0;
};

/// Looks for F in the subdifferential of ||.||_(p,k) at R = A - Y with F orthogonal to M.
/// Needs p >= 2 (spectral counts as (2, 1)).
CertifyOutcome certify_best(const CMatrix& A, ApproximationResult& result, const MatrixSubspace& M,
                            const NormSpec& spec, double cert_tol = 1e-7);

struct UniquenessReport {
  bool unique_predicted = false;
  double empirical_spread = 0.0;
  bool violation = false;
  std::vector<cplx> minimizers;
};

/// Minimizes alpha -> ||A - alpha X||_(p,k) over the complex plane from `trials` starts.
UniquenessReport unique_1d_probe(const CMatrix& A, const CMatrix& X, double p, Index k, int trials,
                                 std::uint64_t seed = 42);

struct StageRecord {
  Index k = 0;
  double minimum = 0.0;
  Index active = 0; ///< singular values tied with sigma_k at the stage solution
  double gap_bound = 0.0;
  bool converged = false;
};

struct StrictOptions {
  int max_iter = 6000;
  double group_tol = 1e-6;
  std::uint64_t seed = 42;
};

struct StrictResult {
  CMatrix Y;
  CVector coefficients;
  CMatrix R;
  RVector sigmaR;
  std::vector<double> rho;
  std::vector<Index> multiplicities;
  std::vector<StageRecord> stages;
  double stage_tol = 0.0;
  bool converged = false;
};

/// Nested minimization of ||A - Y||_(2,k), k = 1..n0, each stage constrained to the
/// (relaxed) optimal sets of the previous stages.
StrictResult strict_spectral(const CMatrix& A, const MatrixSubspace& M, const StrictOptions& opts = {});

enum class LexOrder { Less, Equal, Greater };

LexOrder lex_compare(const RVector& a, const RVector& b, double lex_tol = 1e-9);

enum class PkStatus { Consistent, Inconsistent, NotApplicable };

struct PkReport {
  PkStatus status = PkStatus::NotApplicable;
  double max_deviation = 0.0;
  double best_gap = 0.0; ///< largest sigma_k - sigma_{k+1} among the residuals
  std::vector<RVector> sigmas;
};

PkReport pk_singular_value_check(const CMatrix& A, const MatrixSubspace& M, double p, Index k, int trials,
                                 std::uint64_t seed = 42, double gap_tol = 1e-6, int starts = 8);

const char* to_string(LexOrder o);
const char* to_string(PkStatus s);

} // namespace kyfan
