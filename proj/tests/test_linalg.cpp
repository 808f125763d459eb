#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "lindex/linalg/expm.hpp"
#include "lindex/linalg/matrix.hpp"
#include "lindex/linalg/spectral.hpp"
#include "lindex/random.hpp"
#include "support/oracles.hpp"

using namespace lindex;
using namespace lindex::linalg;
using oracle::C;

TEST(Matrix, ShapeChecks) {
  EXPECT_THROW(ComplexMatrix(0, 3), ContractViolation);
  EXPECT_THROW(ComplexMatrix(2, 2, std::vector<C>(3)), ContractViolation);
  EXPECT_THROW((ComplexMatrix{{1, 2}, {3}}), ContractViolation);
  ComplexMatrix a(2, 3), b(3, 2);
  EXPECT_THROW(a += b, ContractViolation);
  EXPECT_THROW(matmul(a, a), ContractViolation);
}

TEST(Matrix, IdentityTraceAdjoint) {
  const auto id = ComplexMatrix::identity(4);
  EXPECT_EQ(trace(id), C(4.0));
  ComplexMatrix m{{C(1, 2), C(3, -1)}, {C(0, 1), C(5, 0)}};
  const auto md = adjoint(m);
  EXPECT_EQ(md(0, 1), C(0, -1));
  EXPECT_EQ(md(1, 0), C(3, 1));
  EXPECT_EQ(transpose(m)(0, 1), C(0, 1));
  EXPECT_EQ(conjugate(m)(0, 0), C(1, -2));
  EXPECT_NEAR(frobenius_norm(m), std::sqrt(1 + 4 + 9 + 1 + 1 + 25.0), 1e-15);
}

TEST(Matrix, HermiticityErrorIsRelative) {
  ComplexMatrix h{{1, C(0, 1)}, {C(0, -1), 2}};
  EXPECT_EQ(hermiticity_error(h), 0.0);
  h(0, 1) += 1e-6;
  EXPECT_GT(hermiticity_error(h), 1e-7);
  auto big = h * C(1e6);
  EXPECT_NEAR(hermiticity_error(big), hermiticity_error(h), 1e-12);
}

TEST(Gemm, SmallMatchesOracle) {
  oracle::Random rng(1);
  const auto a = rng.matrix(3, 5), b = rng.matrix(5, 4);
  EXPECT_LT(oracle::max_diff(matmul(a, b), oracle::mul(a, b)), 1e-13);
}

// Sizes straddle the packed kernel's block edges (6 x 16 tiles, 256-deep panels).
class GemmPacked : public ::testing::TestWithParam<std::tuple<int, int, int>> {};

TEST_P(GemmPacked, MatchesOracle) {
  const auto [m, n, k] = GetParam();
  oracle::Random rng(static_cast<std::uint64_t>(m * 10007 + n * 101 + k));
  const auto a = rng.matrix(m, k), b = rng.matrix(k, n);
  const auto expect = oracle::mul(a, b);
  EXPECT_LT(oracle::max_diff(matmul(a, b), expect), 1e-11 * std::sqrt(static_cast<double>(k)));
}

INSTANTIATE_TEST_SUITE_P(Shapes, GemmPacked,
                         ::testing::Values(std::tuple{37, 53, 41}, std::tuple{64, 64, 64},
                                           std::tuple{145, 17, 300}, std::tuple{7, 1030, 30},
                                           std::tuple{150, 150, 257}));

TEST(Gemm, AlphaBeta) {
  oracle::Random rng(2);
  for (int d : {3, 40}) {
    const auto a = rng.matrix(d, d), b = rng.matrix(d, d), c0 = rng.matrix(d, d);
    auto c = c0;
    const C alpha(0.5, -2.0), beta(1.5, 0.25);
    gemm(alpha, a, b, beta, c);
    const auto ab = oracle::mul(a, b);
    ComplexMatrix expect(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) expect(i, j) = alpha * ab(i, j) + beta * c0(i, j);
    EXPECT_LT(oracle::max_diff(c, expect), 1e-11);
  }
}

TEST(Gemm, BetaZeroIgnoresGarbage) {
  const auto a = ComplexMatrix::identity(30);
  ComplexMatrix c(30, 30, C(std::nan(""), 0));
  gemm(C(1), a, a, C(0), c);
  EXPECT_TRUE(all_finite(c));
  EXPECT_EQ(c, a);
}

TEST(Gemm, RealMatrices) {
  Matrix<double> a{{1, 2}, {3, 4}}, b{{0, 1}, {1, 0}};
  const auto c = a * b;
  EXPECT_EQ(c(0, 0), 2);
  EXPECT_EQ(c(1, 1), 3);
}

TEST(Matvec, MatchesOracle) {
  oracle::Random rng(3);
  const auto a = rng.matrix(9, 7);
  std::vector<C> x(7);
  for (auto& v : x) v = rng.complex();
  EXPECT_LT(oracle::max_diff(matvec(a, std::span<const C>(x)), oracle::mulv(a, x)), 1e-13);
  EXPECT_THROW(matvec(a, std::span<const C>(x.data(), 6)), ContractViolation);
}

TEST(Kron, MatchesIndexFormula) {
  oracle::Random rng(4);
  const auto a = rng.matrix(2, 3), b = rng.matrix(4, 2);
  EXPECT_LT(oracle::max_diff(kron(a, b), oracle::kron(a, b)), 1e-15);
}

TEST(Kron, PauliExample) {
  ComplexMatrix x{{0, 1}, {1, 0}};
  const auto k = kron(ComplexMatrix::identity(2), x);
  EXPECT_EQ(k(0, 1), C(1));
  EXPECT_EQ(k(2, 3), C(1));
  EXPECT_EQ(k(0, 2), C(0));
}

TEST(Kron, RespectsBudget) {
  const auto a = ComplexMatrix::identity(8);
  EXPECT_EQ(dense_bytes<C>(64, 64), 64u * 64u * 16u);
  EXPECT_THROW(kron(a, a, MemoryBudget{64 * 64 * 16 - 1}), MemoryBudgetExceeded);
  EXPECT_NO_THROW(kron(a, a, MemoryBudget{64 * 64 * 16}));
}

TEST(DenseBytes, Saturates) {
  EXPECT_EQ(dense_bytes<C>(std::uint64_t{1} << 40, std::uint64_t{1} << 40), UINT64_MAX);
}

// ---------------------------------------------------------------------------
// expm
// ---------------------------------------------------------------------------

class ExpmBoth : public ::testing::TestWithParam<ExpmConfig> {};

TEST_P(ExpmBoth, ZeroIsIdentity) {
  EXPECT_EQ(oracle::max_diff(expm(ComplexMatrix(3, 3), GetParam()), ComplexMatrix::identity(3)), 0.0);
}

TEST_P(ExpmBoth, Diagonal) {
  ComplexMatrix d{{C(1.5), 0}, {0, C(-2.0, 0.5)}};
  const auto e = expm(d, GetParam());
  EXPECT_LT(std::abs(e(0, 0) - std::exp(C(1.5))), 1e-13 * std::exp(1.5));
  EXPECT_LT(std::abs(e(1, 1) - std::exp(C(-2.0, 0.5))), 1e-14);
  EXPECT_EQ(e(0, 1), C(0));
}

TEST_P(ExpmBoth, Nilpotent) {
  ComplexMatrix n{{0, 1}, {0, 0}};
  const auto e = expm(n, GetParam());
  EXPECT_LT(oracle::max_diff(e, ComplexMatrix{{1, 1}, {0, 1}}), 1e-15);
}

TEST_P(ExpmBoth, Rotation) {
  const double th = 2.5;
  ComplexMatrix g{{0, -th}, {th, 0}};
  const auto e = expm(g, GetParam());
  EXPECT_LT(oracle::max_diff(e, ComplexMatrix{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}}), 1e-14);
}

TEST_P(ExpmBoth, InverseAndOracle) {
  oracle::Random rng(5);
  for (double scale : {0.1, 0.5, 3.0}) {
    auto a = rng.matrix(6, 6) * C(scale);
    const auto e = expm(a, GetParam());
    if (scale < 1) {
      const auto einv = expm(a * C(-1), GetParam());
      EXPECT_LT(oracle::max_diff(matmul(e, einv), ComplexMatrix::identity(6)), 1e-12);
    }
    const auto ref = oracle::expm_series(a);
    EXPECT_LT(oracle::max_diff(e, ref) / oracle::max_abs(ref), 1e-11);
  }
}

INSTANTIATE_TEST_SUITE_P(Methods, ExpmBoth, ::testing::Values(ExpmConfig::pade(), ExpmConfig::taylor()),
                         [](const auto& info) { return std::string(to_string(info.param.method)); });

TEST(Expm, ExplicitScaling) {
  ComplexMatrix a{{0, 3}, {-3, 0}};
  auto cfg = ExpmConfig::pade();
  cfg.scaling = 6;
  EXPECT_LT(oracle::max_diff(expm(a, cfg), expm(a)), 1e-13);
}

TEST(Expm, RejectsNonSquareAndNonFinite) {
  EXPECT_THROW(expm(ComplexMatrix(2, 3)), ContractViolation);
  ComplexMatrix bad{{std::nan(""), 0}, {0, 0}};
  EXPECT_THROW(expm(bad), NumericalFailure);
}

TEST(Expm, AutoScaling) {
  EXPECT_EQ(auto_scaling(0.5), 0u);
  EXPECT_EQ(auto_scaling(1.0), 0u);
  EXPECT_EQ(auto_scaling(1.01), 1u);
  EXPECT_EQ(auto_scaling(8.0), 3u);
  EXPECT_EQ(auto_scaling(9.0), 4u);
}

TEST(Expm, LongDouble) {
  using CL = std::complex<long double>;
  Matrix<CL> g{{0, CL(-1)}, {CL(1), 0}};
  const auto e = expm(g, ExpmConfig::pade(10));
  EXPECT_LT(std::abs(e(0, 0) - CL(std::cos(1.0L))), 1e-18L);
  EXPECT_LT(std::abs(e(1, 0) - CL(std::sin(1.0L))), 1e-18L);
}

TEST(LuSolve, ResidualAndSingular) {
  oracle::Random rng(6);
  const auto a = rng.matrix(12, 12), b = rng.matrix(12, 3);
  const auto x = lu_solve(a, b);
  EXPECT_LT(oracle::max_diff(oracle::mul(a, x), b), 1e-11);
  ComplexMatrix s{{1, 2}, {2, 4}};
  EXPECT_THROW(lu_solve(s, ComplexMatrix::identity(2)), NumericalFailure);
}

// ---------------------------------------------------------------------------
// spectral
// ---------------------------------------------------------------------------

TEST(Spectral, DiagonalExact) {
  ComplexMatrix d{{C(0.5), 0, 0}, {0, C(0, -3.0), 0}, {0, 0, C(1.0)}};
  const auto est = spectral_norm(d);
  EXPECT_TRUE(est.converged);
  EXPECT_NEAR(est.value, 3.0, 1e-12);
}

TEST(Spectral, MatchesEigenOracle) {
  oracle::Random rng(7);
  const auto a = rng.matrix(8, 8);
  const auto ev = hermitian_eigenvalues(oracle::mul(oracle::dag(a), a));
  EXPECT_NEAR(spectral_norm(a).value, std::sqrt(ev.back()), 1e-9 * std::sqrt(ev.back()));
}

TEST(Spectral, HermitianEigenvalues) {
  ComplexMatrix x{{0, 1}, {1, 0}};
  const auto ev = hermitian_eigenvalues(x);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0], -1.0, 1e-14);
  EXPECT_NEAR(ev[1], 1.0, 1e-14);
  ComplexMatrix y{{0, C(0, -1)}, {C(0, 1), 0}};
  EXPECT_NEAR(hermitian_eigenvalues(y)[0], -1.0, 1e-14);
}

TEST(Spectral, RandomHermitianTraceAndReconstruction) {
  oracle::Random rng(8);
  const auto h = rng.hermitian(7);
  const auto ev = hermitian_eigenvalues(h);
  double s = 0;
  for (double v : ev) s += v;
  EXPECT_NEAR(s, trace(h).real(), 1e-12);
  EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end()));
  EXPECT_LT(oracle::max_diff(hermitian_function(h, [](double v) { return v; }), h), 1e-12);
  const auto sq = hermitian_function(h, [](double v) { return v * v; });
  EXPECT_LT(oracle::max_diff(sq, oracle::mul(h, h)), 1e-11);
}

TEST(Spectral, ExpOfHermitianMatchesExpm) {
  oracle::Random rng(9);
  const auto h = rng.hermitian(5);
  const auto a = hermitian_function(h, [](double v) { return std::exp(-v); });
  EXPECT_LT(oracle::max_diff(a, expm(h * C(-1))), 1e-12);
}

TEST(SymmetricEigen, Diagonalizes) {
  Matrix<double> a{{2, 1, 0}, {1, 2, 1}, {0, 1, 2}};
  const auto e = symmetric_eigen(a);
  EXPECT_NEAR(e.values[0], 2 - std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(e.values[2], 2 + std::sqrt(2.0), 1e-14);
}

// ---------------------------------------------------------------------------
// random streams
// ---------------------------------------------------------------------------

TEST(StreamRng, DeterministicAndIndependent) {
  StreamRng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto va = a();
    EXPECT_EQ(va, b());
    EXPECT_NE(va, c());
    EXPECT_NE(va, d());
  }
  EXPECT_EQ(a.draws(), 100u);
}

TEST(StreamRng, Moments) {
  StreamRng r(1, 0);
  double su = 0, sn = 0, sn2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
  }
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.015);
}
