#include <gtest/gtest.h>

#include "kyfan/subdiff.hpp"
#include "support.hpp"

using namespace kyfan;
using kyfan::testing::separated_sigma;
using kyfan::testing::with_singular_values;

namespace {

/// f_V(X) = Re tr(V V^* (X^*X)^(p/2)), evaluated directly.
double f_V(const CMatrix& X, const CMatrix& V, double p)
{
  return (V * V.adjoint() * psd_power(X.adjoint() * X, p / 2.0)).trace().real();
}

/// Central difference of f_V along E.
double fd_f_V(const CMatrix& A, const CMatrix& E, const CMatrix& V, double p, double t)
{
  return (f_V(A + t * E, V, p) - f_V(A - t * E, V, p)) / (2.0 * t);
}

double one_sided(const CMatrix& A, const CMatrix& X, double p, Index k, double t)
{
  const NormSpec s = NormSpec::kyfan(p, k);
  return (norm(A + t * X, s) - norm(A, s)) / t;
}

CMatrix e_col(Index n, Index i)
{
  CMatrix v = CMatrix::Zero(n, 1);
  v(i, 0) = 1.0;
  return v;
}

} // namespace

TEST(FvGradient, DiagonalExamples)
{
  const CMatrix A = diag_matrix({2.0, 1.0});
  const CMatrix G1 = fv_gradient(A, e_col(2, 0), 4.0);
  EXPECT_LE(max_abs(G1 - diag_matrix({32.0, 0.0})), 1e-12);
  const CMatrix G2 = fv_gradient(A, e_col(2, 1), 4.0);
  EXPECT_LE(max_abs(G2 - diag_matrix({0.0, 4.0})), 1e-12);
  // the same numbers from differentiating (2+t)^4 and (1+t)^4
  EXPECT_NEAR(fd_f_V(A, diag_matrix({1.0, 0.0}), e_col(2, 0), 4.0, 1e-5), 32.0, 1e-6);
  EXPECT_NEAR(fd_f_V(A, diag_matrix({0.0, 1.0}), e_col(2, 1), 4.0, 1e-5), 4.0, 1e-6);
}

TEST(FvGradient, NullVectorsGiveZero)
{
  const CMatrix A = diag_matrix({2.0, 0.0});
  EXPECT_LE(max_abs(fv_gradient(A, e_col(2, 1), 3.0)), 1e-15);
}

TEST(FvGradient, Rejections)
{
  const CMatrix A = diag_matrix({2.0, 1.0});
  EXPECT_THROW(fv_gradient(A, CMatrix::Zero(2, 0), 4.0), Error);
  CMatrix V(2, 1);
  V << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  try {
    fv_gradient(A, V, 4.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
  try {
    fv_gradient(A, e_col(2, 0), 2.0);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unsupported);
  }
}

TEST(FvGradient, MatchesFiniteDifferences)
{
  Rng rng(101);
  for (int t = 0; t < 40; ++t) {
    const Index n = 3;
    const CMatrix A = random_complex(4, n, rng);
    const SvdFactors f = svd(A);
    const Index k = 1 + t % n;
    const double p = 2.5 + (t % 4);
    const CMatrix V = f.right.leftCols(k);
    const CMatrix G = fv_gradient(A, V, p);
    const CMatrix E = random_complex(4, n, rng);
    // f_V is differentiable at A for the fixed V; compare the pairing with a central difference
    EXPECT_NEAR(real_pairing(G, E), fd_f_V(A, E, V, p, 1e-5), 1e-5 * (1 + std::abs(real_pairing(G, E))));
  }
}

TEST(Descriptor, SingletonExamples)
{
  const SubdiffDescriptor d1 = descriptor(diag_matrix({2.0, 1.0}), 2.0, 1);
  EXPECT_TRUE(d1.singleton());
  EXPECT_LE(max_abs(d1.canonical_point() - diag_matrix({1.0, 0.0})), 1e-14);

  const SubdiffDescriptor d2 = descriptor(diag_matrix({2.0, 1.0}), 3.0, 2);
  EXPECT_TRUE(d2.singleton());
  const CMatrix expected = diag_matrix({4.0, 1.0}) / std::pow(9.0, 2.0 / 3.0);
  EXPECT_LE(max_abs(d2.canonical_point() - expected), 1e-14);
  EXPECT_NEAR(schatten_norm(expected, 1.5), 1.0, 1e-14);
}

TEST(Descriptor, DegenerateTopBlock)
{
  const SubdiffDescriptor d = descriptor(CMatrix::Identity(2, 2), 2.0, 1);
  EXPECT_FALSE(d.singleton());
  ASSERT_TRUE(d.boundary.has_value());
  EXPECT_EQ(d.boundary->dim, 2);
  EXPECT_EQ(d.boundary->required, 1);
  for (std::uint64_t seed : {1u, 2u}) {
    const CMatrix G = sample_extreme(d, seed);
    EXPECT_EQ(numerical_rank(G), 1);
    EXPECT_NEAR(schatten_norm(G, 2.0), 1.0, 1e-9);
    EXPECT_NEAR(real_pairing(G, CMatrix::Identity(2, 2)), 1.0, 1e-9);
    // uu^* for a unit u
    EXPECT_LE(max_abs(G * G - G), 1e-12);
  }
  EXPECT_GT(max_abs(sample_extreme(d, 1) - sample_extreme(d, 2)), 1e-3);
}

TEST(Descriptor, FullBlockIgnoresSeed)
{
  const SubdiffDescriptor d = descriptor(diag_matrix({1.0, 1.0, 0.0}), 2.0, 2);
  EXPECT_TRUE(d.singleton());
  const CMatrix P = diag_matrix({1.0, 1.0, 0.0}) / std::sqrt(2.0);
  for (std::uint64_t seed : {1u, 7u, 123u}) EXPECT_LE(max_abs(sample_extreme(d, seed) - P), 1e-14);
}

TEST(Descriptor, ZeroAndLowP)
{
  const SubdiffDescriptor d = descriptor(CMatrix::Zero(2, 3), 3.0, 2);
  EXPECT_EQ(d.kind, SubdiffKind::DualUnitBall);
  const CMatrix G = sample_extreme(d, 5);
  EXPECT_NEAR(dual_norm(G, NormSpec::kyfan(3.0, 2)), 1.0, 1e-10);
  try {
    descriptor(CMatrix::Identity(2, 2), 1.5, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unsupported);
  }
}

TEST(Descriptor, FrobeniusReduction)
{
  Rng rng(103);
  for (int t = 0; t < 30; ++t) {
    const CMatrix A = random_complex(3, 4, rng);
    const SubdiffDescriptor d = descriptor(A, 2.0, 3);
    EXPECT_TRUE(d.singleton());
    EXPECT_LE(max_abs(d.canonical_point() - A / A.norm()), 1e-12);
  }
}

TEST(Descriptor, RankDeficientIsFlagged)
{
  const SubdiffDescriptor d = descriptor(diag_matrix({2.0, 0.0, 0.0}), 3.0, 2);
  EXPECT_TRUE(d.rank_deficient);
  EXPECT_TRUE(d.singleton());
  EXPECT_LE(max_abs(d.canonical_point() - diag_matrix({1.0, 0.0, 0.0})), 1e-14);
}

TEST(Descriptor, BlockBookkeeping)
{
  Rng rng(107);
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> s = {3.0, 2.0, 2.0, 2.0, 1.0};
    const CMatrix A = with_singular_values(5, 5, s, rng);
    const Index k = 1 + t % 5;
    const SubdiffDescriptor d = descriptor(A, 2.0 + 0.5 * (t % 3), k);
    Index covered = 0;
    for (Index j : d.full_blocks) covered += d.blocks.multiplicities[static_cast<std::size_t>(j)];
    if (d.boundary) covered += d.boundary->required;
    EXPECT_EQ(covered, k);
    EXPECT_EQ(d.boundary.has_value(), k == 2 || k == 3);
  }
}

TEST(Extremes, InvariantsAndSubgradientInequality)
{
  Rng rng(109);
  for (int t = 0; t < 60; ++t) {
    const double p = std::vector<double>{2.0, 2.5, 3.0, 4.0}[t % 4];
    std::vector<double> s = separated_sigma(4, 0.05, rng);
    if (t % 2 == 0) s[2] = s[1];
    const CMatrix A = with_singular_values(4, 4, s, rng);
    const Index k = 1 + t % 4;
    const SubdiffDescriptor d = descriptor(A, p, k);
    const NormSpec spec = NormSpec::kyfan(p, k);
    const double na = norm(A, spec);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const CMatrix G = sample_extreme(d, 1000 * t + seed);
      EXPECT_NEAR(schatten_norm(G, p / (p - 1.0)), 1.0, 1e-9);
      EXPECT_NEAR(real_pairing(G, A), na, 1e-9 * na);
      for (int j = 0; j < 5; ++j) {
        const CMatrix X = random_complex(4, 4, rng);
        EXPECT_GE(norm(X, spec) - na, real_pairing(G, X - A) - 1e-8);
      }
    }
  }
}

TEST(Membership, Examples)
{
  const CMatrix A = diag_matrix({2.0, 1.0});
  EXPECT_TRUE(membership(A, 2.0, 1, diag_matrix({1.0, 0.0}), 1e-9));
  EXPECT_FALSE(membership(A, 2.0, 1, CMatrix::Zero(2, 2), 1e-9));
  const SubdiffDescriptor d = descriptor(CMatrix::Identity(2, 2), 2.0, 1);
  const CMatrix mid = 0.5 * (sample_extreme(d, 1) + sample_extreme(d, 2));
  EXPECT_TRUE(membership(CMatrix::Identity(2, 2), 2.0, 1, mid, 1e-9));
  // a scaled-up subgradient breaks the dual bound
  EXPECT_FALSE(membership(A, 2.0, 1, diag_matrix({1.5, 0.0}), 1e-9));
}

TEST(Membership, ConvexCombinations)
{
  Rng rng(113);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const CMatrix A = with_singular_values(4, 3, {2.0, 1.0, 1.0}, rng);
    const double p = 2.0 + t % 3;
    const SubdiffDescriptor d = descriptor(A, p, 2);
    CMatrix G = CMatrix::Zero(4, 3);
    double total = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double w = u(rng);
      G += w * sample_extreme(d, 50 * t + j);
      total += w;
    }
    EXPECT_TRUE(membership(A, p, 2, G / total, 1e-9));
  }
}

TEST(DirDerivative, Examples)
{
  const CMatrix A = diag_matrix({2.0, 1.0});
  EXPECT_NEAR(dir_derivative(A, CMatrix::Identity(2, 2), 2.0, 1), 1.0, 1e-14);
  EXPECT_NEAR(dir_derivative(A, diag_matrix({0.0, 1.0}), 2.0, 1), 0.0, 1e-14);
  const CMatrix I = CMatrix::Identity(2, 2);
  const CMatrix X = diag_matrix({1.0, -1.0});
  EXPECT_NEAR(dir_derivative(I, X, 2.0, 1), 1.0, 1e-14);
  for (double t : {1e-4, 1e-5, 1e-6}) {
    EXPECT_NEAR(one_sided(I, X, 2.0, 1, t), 1.0, 1e-6);
    // the kink: the two one-sided slopes differ
    EXPECT_NEAR(one_sided(I, -X, 2.0, 1, t), 1.0, 1e-6);
  }
}

TEST(DirDerivative, AtZeroIsTheNorm)
{
  Rng rng(127);
  const CMatrix X = random_complex(3, 3, rng);
  EXPECT_NEAR(dir_derivative(CMatrix::Zero(3, 3), X, 3.0, 2), norm(X, NormSpec::kyfan(3.0, 2)), 1e-12);
}

TEST(DirDerivative, SeparatedSpectraMatchFiniteDifferences)
{
  Rng rng(131);
  for (int t = 0; t < 100; ++t) {
    const double p = std::vector<double>{2.0, 2.5, 3.0, 4.0}[t % 4];
    const Index n = 2 + t % 3;
    const CMatrix A = with_singular_values(n, n, separated_sigma(n, 0.2, rng), rng);
    const CMatrix X = random_complex(n, n, rng);
    const Index k = 1 + t % n;
    EXPECT_NEAR(dir_derivative(A, X, p, k), one_sided(A, X, p, k, 1e-6), 1e-4 * (1 + X.norm()));
  }
}

TEST(DirDerivative, MaxOverExtremePointsBoundsSamples)
{
  Rng rng(137);
  for (int t = 0; t < 20; ++t) {
    const CMatrix A = with_singular_values(3, 3, {1.0, 1.0, 0.4}, rng);
    const CMatrix X = random_complex(3, 3, rng);
    const double dd = dir_derivative(A, X, 3.0, 1);
    const SubdiffDescriptor d = descriptor(A, 3.0, 1);
    for (std::uint64_t s = 0; s < 50; ++s) EXPECT_LE(real_pairing(sample_extreme(d, s), X), dd + 1e-12);
  }
}
