#pragma once

#include <string>
#include <vector>

#include "kyfan/approx.hpp"

namespace kyfan {

struct SweepRecord {
  double p = 2.0;
  CVector coefficients;
  RVector sigmaR;
  double value_p = 0.0;   ///< ||R_p||_p
  double value_inf = 0.0; ///< sigma_1(R_p)
  double dist_to_strict = 0.0;
  bool converged = true;
  bool warm_cold_disagree = false;
};

struct SweepOptions {
  int starts = 12;
  int max_iter = 5000;
  std::uint64_t seed = 42;
};

/// Schatten-p best approximations along an increasing grid, each warm-started from the
/// previous coefficients while keeping the least-squares cold start.
std::vector<SweepRecord> p_sweep(const CMatrix& A, const MatrixSubspace& M, const std::vector<double>& p_grid,
                                 const StrictResult& strict, const SweepOptions& opts = {});
std::vector<SweepRecord> p_sweep(const CMatrix& A, const MatrixSubspace& M, const std::vector<double>& p_grid,
                                 const SweepOptions& opts = {});

/// {2, 4, 8, ..., p_max}.
std::vector<double> geometric_grid(double p_max);

enum class Verdict { ConvergesWithinTol, Inconclusive, Diverging };
const char* to_string(Verdict v);

struct IndexConvergence {
  Index index = 0; ///< 1-based
  double gap = 0.0;
  double slope = 0.0; ///< least-squares slope of the gap against log2 p over the window
  Verdict verdict = Verdict::Inconclusive;
  bool theorem_backed = false;
};

struct ConvergenceReport {
  std::vector<IndexConvergence> indices;
  Index first_block = 0; ///< s_1
  double final_distance = 0.0;
  Verdict overall = Verdict::Inconclusive;
};

ConvergenceReport convergence_checks(const std::vector<SweepRecord>& sweep, const StrictResult& strict,
                                     double tol = 0.02, int window = 5);

struct ChainRecord {
  double p = 2.0;
  double sigma3_schatten = 0.0; ///< sigma_3(R_p)
  double sigma3_kyfan = 0.0;    ///< sigma_3(R^(p,2))
  bool kyfan_optimality = false;    ///< ||R^(p,2)||_(p,2) <= ||R_p||_(p,2)
  bool schatten_optimality = false; ///< ||R_p||_p <= ||R^(p,2)||_p
  bool sigma3_order = false;        ///< sigma_3(R_p) <= sigma_3(R^(p,2)) + 1e-8
  double spread = 0.0;              ///< uniqueness probe for the (p, 2) problem
  bool converged = true;
};

struct CounterexampleReport {
  CMatrix A;
  CMatrix X;
  StrictResult strict;
  std::vector<SweepRecord> per_p;
  std::vector<ChainRecord> chain;
  /// True when every p confirms sigma_3(R_p) <= sigma_3(R^(p,2)), so R^(p,2) cannot supply
  /// a matrix whose third singular value drops below that of R_p.
  bool contradiction = false;
};

CounterexampleReport counterexample_run(const std::vector<double>& p_list, const SweepOptions& opts = {});

/// One row per record: p, coefficients, sigma_1..sigma_n0, value_p, value_inf, distToStrict.
void emit_csv(const std::vector<SweepRecord>& records, const std::string& path);
std::string csv_text(const std::vector<SweepRecord>& records);
std::string csv_quote(const std::string& field);

} // namespace kyfan
