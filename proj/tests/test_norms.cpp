#include <gtest/gtest.h>

#include <algorithm>

#include "kyfan/norms.hpp"
#include "support.hpp"

using namespace kyfan;

namespace {

/// (sum of the k largest |x_i|^p)^(1/p) on R^3.
double gauge3(const double* x, double p, int k)
{
  double a[3] = {std::abs(x[0]), std::abs(x[1]), std::abs(x[2])};
  std::sort(a, a + 3, std::greater<>());
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += std::pow(a[i], p);
  return std::pow(s, 1.0 / p);
}

/// max of d.x / gauge(x) over a dense grid of the positive octant, refined once.
double grid_dual(const double* d, double p, int k)
{
  auto ratio = [&](const double* x) {
    const double g = gauge3(x, p, k);
    return g > 0.0 ? (d[0] * x[0] + d[1] * x[1] + d[2] * x[2]) / g : 0.0;
  };
  const int N = 200;
  double best = 0.0, bx[3] = {1, 1, 1};
  double x[3];
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j)
      for (int l = 0; l <= N; ++l) {
        x[0] = double(i) / N;
        x[1] = double(j) / N;
        x[2] = double(l) / N;
        const double v = ratio(x);
        if (v > best) {
          best = v;
          std::copy(x, x + 3, bx);
        }
      }
  const double h = 1.0 / N;
  const double c[3] = {bx[0], bx[1], bx[2]};
  for (int i = -20; i <= 20; ++i)
    for (int j = -20; j <= 20; ++j)
      for (int l = -20; l <= 20; ++l) {
        x[0] = std::max(0.0, c[0] + i * h / 20);
        x[1] = std::max(0.0, c[1] + j * h / 20);
        x[2] = std::max(0.0, c[2] + l * h / 20);
        best = std::max(best, ratio(x));
      }
  return best;
}

CMatrix random_unitary(Index n, Rng& rng) { return haar_isometry(n, n, rng); }

std::vector<NormSpec> specs_for(Index n0)
{
  std::vector<NormSpec> out{NormSpec::spectral(), NormSpec::trace()};
  for (double p : {1.0, 1.5, 2.0, 3.0, 7.0})
    for (Index k = 1; k <= n0; ++k) out.push_back(NormSpec::kyfan(p, k));
  return out;
}

} // namespace

TEST(Norm, KyFanExamples)
{
  const CMatrix D = diag_matrix({3.0, 2.0, 1.0});
  EXPECT_NEAR(norm(D, NormSpec::kyfan(1, 2)), 5.0, 1e-14);
  EXPECT_NEAR(norm(D, NormSpec::kyfan(2, 2)), std::sqrt(13.0), 1e-14);
  EXPECT_NEAR(norm(CMatrix::Identity(3, 3), NormSpec::kyfan(4, 3)), std::pow(3.0, 0.25), 1e-14);
  EXPECT_NEAR(norm(D, NormSpec::spectral()), 3.0, 1e-14);
  EXPECT_NEAR(norm(D, NormSpec::trace()), 6.0, 1e-14);
  EXPECT_NEAR(norm(D, NormSpec::schatten(2)), std::sqrt(14.0), 1e-14);
  EXPECT_EQ(norm(CMatrix::Zero(2, 3), NormSpec::kyfan(3, 2)), 0.0);
}

TEST(Norm, SpecValidation)
{
  EXPECT_THROW(NormSpec::kyfan(0.5, 1), Error);
  EXPECT_THROW(NormSpec::kyfan(2.0, 0), Error);
  EXPECT_THROW(NormSpec::kyfan(2e6, 1), Error);
  EXPECT_THROW(NormSpec::kyfan(std::numeric_limits<double>::infinity(), 1), Error);
  EXPECT_THROW(norm(CMatrix::Identity(2, 2), NormSpec::kyfan(2, 3)), Error);
  EXPECT_NO_THROW(NormSpec::kyfan(1e6, 1));
}

TEST(Norm, ParseSyntax)
{
  const NormSpec a = NormSpec::parse("kyfan:p=3,k=2");
  EXPECT_EQ(a.family(), NormSpec::Family::KyFan);
  EXPECT_DOUBLE_EQ(a.p(), 3.0);
  EXPECT_EQ(a.k_for(4), 2);
  EXPECT_TRUE(NormSpec::parse("spectral").is_spectral());
  const NormSpec s = NormSpec::parse("schatten:p=4");
  EXPECT_TRUE(s.k_is_all());
  EXPECT_EQ(s.k_for(5), 5);
  const NormSpec t = NormSpec::parse("trace");
  EXPECT_DOUBLE_EQ(t.p(), 1.0);
  for (const char* bad : {"", "kyfan", "kyfan:p=3", "kyfan:p=x,k=2", "kyfan:p=3,k=2.5", "frobenius", "kyfan:p=3,k=2,q=1"})
    EXPECT_THROW(NormSpec::parse(bad), Error) << bad;
  EXPECT_EQ(NormSpec::parse(a.to_string()).to_string(), a.to_string());
}

TEST(Norm, LargePIsStable)
{
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const CMatrix A = 1e150 * random_complex(4, 4, rng);
    const double s1 = svd(A).sigma[0];
    for (Index k = 1; k <= 4; ++k) {
      const double v = norm(A, NormSpec::kyfan(1e4, k));
      ASSERT_TRUE(std::isfinite(v));
      EXPECT_GE(v, s1 * (1 - 1e-15));
      EXPECT_LE(v - s1, s1 * (std::pow(double(k), 1e-4) - 1.0) + 1e-12 * s1);
    }
  }
}

TEST(Norm, UnitaryInvariance)
{
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const CMatrix A = random_complex(3, 4, rng);
    const CMatrix U = random_unitary(3, rng), V = random_unitary(4, rng);
    for (const NormSpec& s : specs_for(3)) {
      const double a = norm(A, s);
      EXPECT_NEAR(norm(U * A * V, s), a, 1e-10 * a);
    }
  }
}

TEST(Norm, MonotoneInKAndP)
{
  Rng rng(47);
  for (int t = 0; t < 50; ++t) {
    const CMatrix A = random_complex(4, 4, rng);
    for (double p : {1.0, 2.0, 3.5, 10.0})
      for (Index k = 1; k < 4; ++k)
        EXPECT_LE(norm(A, NormSpec::kyfan(p, k)), norm(A, NormSpec::kyfan(p, k + 1)) + 1e-13);
    for (Index k = 1; k <= 4; ++k) {
      double prev = std::numeric_limits<double>::infinity();
      for (double p : {1.0, 1.5, 2.0, 4.0, 8.0, 64.0}) {
        const double v = norm(A, NormSpec::kyfan(p, k));
        EXPECT_LE(v, prev + 1e-12);
        prev = v;
      }
    }
  }
}

TEST(Norm, TriangleAndHomogeneity)
{
  Rng rng(53);
  for (int t = 0; t < 30; ++t) {
    const CMatrix A = random_complex(3, 3, rng), B = random_complex(3, 3, rng);
    const cplx c(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng));
    for (const NormSpec& s : specs_for(3)) {
      const double na = norm(A, s), nb = norm(B, s);
      EXPECT_LE(norm(A + B, s), (na + nb) * (1 + 1e-10));
      EXPECT_NEAR(norm(c * A, s), std::abs(c) * na, 1e-10 * std::abs(c) * na);
    }
  }
}

TEST(DualNorm, Examples)
{
  EXPECT_NEAR(dual_norm(diag_matrix({1.0, 1.0}), NormSpec::spectral()), 2.0, 1e-12);
  EXPECT_NEAR(dual_norm(diag_matrix({3.0, 4.0}), NormSpec::schatten(2)), 5.0, 1e-12);
  EXPECT_NEAR(dual_norm(diag_matrix({3.0, 4.0}), NormSpec::trace()), 4.0, 1e-12);
}

TEST(DualNorm, GridOracleOnIdentity)
{
  const double d[3] = {1.0, 1.0, 1.0};
  const double grid = grid_dual(d, 3.0, 2);
  EXPECT_NEAR(dual_norm(CMatrix::Identity(3, 3), NormSpec::kyfan(3, 2)), grid, 1e-4);
}

TEST(DualNorm, GridOracleOnRandomSpectra)
{
  Rng rng(59);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const std::pair<double, int> cases[] = {{1.0, 2}, {2.0, 1}, {2.0, 2}, {3.0, 2}, {4.0, 3}, {1.5, 2}};
  for (auto [p, k] : cases) {
    double d[3] = {u(rng), u(rng), u(rng)};
    std::sort(d, d + 3, std::greater<>());
    RVector dv(3);
    dv << d[0], d[1], d[2];
    const double grid = grid_dual(d, p, k);
    EXPECT_NEAR(dual_gauge(dv, p, k), grid, 1e-4 * (1.0 + grid)) << "p=" << p << " k=" << k;
  }
}

TEST(DualNorm, ClosedFormMatchesAscent)
{
  Rng rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const Index n = 1 + t % 6;
    RVector d(n);
    for (Index i = 0; i < n; ++i) d[i] = t % 4 == 0 ? 1.0 : u(rng);
    std::sort(d.data(), d.data() + n, std::greater<>());
    const double p = 1.0 + 4.0 * u(rng);
    const Index k = 1 + t % n;
    const double a = dual_gauge(d, p, k), b = dual_gauge_ascent(d, p, k);
    EXPECT_NEAR(a, b, 1e-8 * (1.0 + a)) << "p=" << p << " k=" << k;
  }
}

TEST(DualNorm, DualityConsistency)
{
  Rng rng(67);
  for (int t = 0; t < 50; ++t) {
    const CMatrix A = random_complex(3, 4, rng), G = random_complex(3, 4, rng);
    for (const NormSpec& s : specs_for(3)) {
      EXPECT_LE(std::abs(real_pairing(G, A)), dual_norm(G, s) * norm(A, s) + 1e-8);
      // the subgradient attains the pairing with unit dual norm
      const CMatrix S = norm_subgradient(A, s);
      EXPECT_NEAR(real_pairing(S, A), norm(A, s), 1e-10 * norm(A, s));
      EXPECT_LE(dual_norm(S, s), 1.0 + 1e-10);
    }
  }
}

TEST(VariationalCheck, Examples)
{
  EXPECT_NEAR(variational_norm_check(diag_matrix({2.0, 1.0}), 2.0, 1, 10, 1), 2.0, 1e-12);
  EXPECT_NEAR(variational_norm_check(diag_matrix({2.0, 1.0}), 2.0, 1, 10, 99), 2.0, 1e-12);
  EXPECT_EQ(variational_norm_check(CMatrix::Zero(3, 3), 3.0, 2, 10, 1), 0.0);
}

TEST(VariationalCheck, NeverExceedsNormAndAttainsIt)
{
  Rng rng(71);
  for (int t = 0; t < 30; ++t) {
    const CMatrix A = random_complex(3, 3, rng);
    for (double p : {1.0, 2.0, 3.0})
      for (Index k = 1; k <= 3; ++k) {
        const double nv = norm(A, NormSpec::kyfan(p, k));
        const double v = variational_norm_check(A, p, k, 25, 1000 + t);
        EXPECT_LE(v, nv + 1e-9);
        EXPECT_NEAR(v, nv, 1e-6);
      }
  }
}
