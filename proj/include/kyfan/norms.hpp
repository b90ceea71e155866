#pragma once

#include <cstdint>
#include <string>

#include "kyfan/matrix.hpp"

namespace kyfan {

/// Selects a Ky Fan p-k norm (sum of the p-th powers of the k largest singular
/// values, to the power 1/p) or the spectral norm.  Schatten-p and the trace norm
/// are Ky Fan norms with k = min(m, n), which is resolved against a concrete shape.
class NormSpec {
public:
  enum class Family { KyFan, Spectral };

  /// Larger exponents lose accuracy in p^(1/p); use spectral() instead.
  static constexpr double kMaxP = 1e6;

  static NormSpec kyfan(double p, Index k);
  static NormSpec schatten(double p);
  static NormSpec trace() { return schatten(1.0); }
  static NormSpec spectral();

  /// Parses "kyfan:p=3,k=2", "spectral", "schatten:p=4" or "trace".
  static NormSpec parse(const std::string& text);

  Family family() const { return family_; }
  bool is_spectral() const { return family_ == Family::Spectral; }
  /// Exponent; the spectral norm reports p = 2 because its (2,1) form is used for subgradients.
  double p() const { return family_ == Family::Spectral ? 2.0 : p_; }
  /// k resolved against n0 = min(m, n); spectral gives 1.
  Index k_for(Index n0) const;
  bool k_is_all() const { return family_ == Family::KyFan && k_ == 0; }

  void validate(Index n0) const;
  std::string to_string() const;

private:
  NormSpec(Family family, double p, Index k) : family_(family), p_(p), k_(k) {}

  Family family_;
  double p_;
  Index k_; // 0 = all singular values
};

/// (sigma_1^p + ... + sigma_k^p)^(1/p) from a non-increasing sigma, evaluated as
/// sigma_1 * (sum (sigma_i / sigma_1)^p)^(1/p) so that large p cannot overflow.
double kyfan_value(const RVector& sigma, double p, Index k);
double norm_of_sigma(const RVector& sigma, const NormSpec& spec);
double norm(const CMatrix& A, const NormSpec& spec);

/// Dual gauge of the k-major l_p gauge at a non-increasing nonnegative d, i.e.
/// max { d . x : x non-increasing, nonnegative, (x_1^p + ... + x_k^p)^(1/p) <= 1 }.
/// Solved exactly: the tail d_k.. is folded into one coordinate, the resulting vector
/// is pooled into non-increasing block means, and the l_q norm (q = p/(p-1)) of the
/// pooled vector is the maximum.
double dual_gauge(const RVector& d, double p, Index k);

/// The same maximum found by projected ascent on the ratio d.x / (x_1^p+...+x_k^p)^(1/p)
/// over the monotone cone, restarted from the k canonical vertices and the uniform vector.
/// Kept as an independent route for cross-checking dual_gauge.
double dual_gauge_ascent(const RVector& d, double p, Index k);

/// max { Re tr(G^* X) : ||X||_spec <= 1 }.
double dual_norm(const CMatrix& G, const NormSpec& spec);

/// One element of the subdifferential of ||.||_spec at A, built from the SVD basis
/// (p >= 1; for A = 0 the zero matrix is returned, which lies in the dual unit ball).
CMatrix norm_subgradient(const SvdFactors& f, Index rows, Index cols, const NormSpec& spec);
CMatrix norm_subgradient(const CMatrix& A, const NormSpec& spec);

/// max over sampled n x k isometries U of (Re tr(U^* (A^*A)^(p/2) U))^(1/p); the top-k
/// right singular vectors are always among the candidates.
double variational_norm_check(const CMatrix& A, double p, Index k, int trials, std::uint64_t seed);

} // namespace kyfan
