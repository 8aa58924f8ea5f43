#include "support.hpp"
#include "zeno/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace zeno;
using zeno::testing::diag;
using zeno::testing::random_hermitian;
using zeno::testing::random_matrix;

namespace {

double reconstruction_residual(const SpectralOperator& op, const ComplexMatrix& a) {
  return operator_norm(op.dense() - a);
}

}  // namespace

TEST(HermitianEig, DiagonalCaseSortsAndPermutes) {
  const SpectralOperator op = hermitian_eig(diag({2.0, -1.0}));
  EXPECT_DOUBLE_EQ(op.eigenvalues()(0), -1.0);
  EXPECT_DOUBLE_EQ(op.eigenvalues()(1), 2.0);
  // Each eigenvector is a unit coordinate vector up to phase.
  const ComplexMatrix& u = op.eigenvectors();
  EXPECT_NEAR(std::abs(u(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(u(0, 1)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(u(0, 0)), 0.0, 1e-14);
}

TEST(HermitianEig, SwapMatrix) {
  ComplexMatrix a(2, 2);
  a << 0, 1, 1, 0;
  const SpectralOperator op = hermitian_eig(a);
  EXPECT_NEAR(op.eigenvalues()(0), -1.0, 1e-14);
  EXPECT_NEAR(op.eigenvalues()(1), 1.0, 1e-14);
}

TEST(HermitianEig, RandomReconstruction) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ComplexMatrix a = random_hermitian(8, seed);
    const SpectralOperator op = hermitian_eig(a);
    EXPECT_LE(reconstruction_residual(op, a), 1e-10 * std::max(1.0, operator_norm(a)));
    EXPECT_LE(unitarity_defect(op.eigenvectors()), 1e-10);
    for (Index i = 1; i < op.dim(); ++i) EXPECT_LE(op.eigenvalues()(i - 1), op.eigenvalues()(i));
  }
}

TEST(HermitianEig, SymmetrizesSmallAsymmetry) {
  ComplexMatrix a = random_hermitian(6, 3);
  a(0, 1) += Complex(1e-11, 0.0);
  const SpectralOperator op = hermitian_eig(a);
  EXPECT_LE(operator_norm(op.dense() - (a + a.adjoint()) / 2.0), 1e-10 * std::max(1.0, operator_norm(a)));
}

TEST(HermitianEig, RejectsNonSquareAndNonHermitian) {
  EXPECT_THROW(hermitian_eig(ComplexMatrix::Zero(2, 3)), ValidationError);
  ComplexMatrix a(2, 2);
  a << 0, 1, 0, 0;
  EXPECT_THROW(hermitian_eig(a), ValidationError);
}

TEST(HermitianEig, RejectsNonFinite) {
  ComplexMatrix a = diag({1.0, 2.0});
  a(0, 0) = std::nan("");
  EXPECT_THROW(hermitian_eig(a), ValidationError);
}

TEST(SpectralOperator, RejectsUnsortedOrNonUnitary) {
  RealVector l(2);
  l << 2.0, 1.0;
  EXPECT_THROW(SpectralOperator(l, ComplexMatrix::Identity(2, 2)), ValidationError);
  l << 1.0, 2.0;
  EXPECT_THROW(SpectralOperator(l, 2.0 * ComplexMatrix::Identity(2, 2)), ValidationError);
}

TEST(SpectralOperator, NonNegativeUsesClampWindow) {
  RealVector l(2);
  l << -1e-12, 1.0;
  const SpectralOperator op(l, ComplexMatrix::Identity(2, 2));
  EXPECT_TRUE(op.non_negative());
  l << -1e-6, 1.0;
  EXPECT_FALSE(SpectralOperator(l, ComplexMatrix::Identity(2, 2)).non_negative());
}

TEST(SubspaceProjection, RequiresOrthonormalColumns) {
  EXPECT_THROW(SubspaceProjection(2.0 * ComplexMatrix::Identity(3, 2)), ValidationError);
  EXPECT_THROW(SubspaceProjection(ComplexMatrix::Identity(2, 3)), ValidationError);
  const SubspaceProjection p(ComplexMatrix::Identity(3, 2));
  EXPECT_EQ(p.rank(), 2);
  EXPECT_EQ(p.ambient_dim(), 3);
}

TEST(ApplyFunction, Identity) {
  const ComplexMatrix r = apply_function(hermitian_eig(diag({1.0, 2.0})), [](double x) { return Complex(x); });
  EXPECT_LE(operator_norm(r - diag({1.0, 2.0})), 1e-14);
}

TEST(ApplyFunction, ExponentialAtZero) {
  const ComplexMatrix r =
      apply_function(hermitian_eig(diag({0.0})), [](double x) { return std::exp(Complex(0.0, -x)); });
  EXPECT_EQ(r(0, 0), Complex(1.0, 0.0));
}

TEST(ApplyFunction, ResolventAtOne) {
  const ComplexMatrix r =
      apply_function(hermitian_eig(diag({1.0})), [](double x) { return 1.0 / Complex(1.0, x); });
  EXPECT_NEAR(r(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(r(0, 0).imag(), -0.5, 1e-15);
}

TEST(ApplyFunction, RealFunctionGivesHermitian) {
  const SpectralOperator op = hermitian_eig(random_hermitian(8, 11));
  const ComplexMatrix r = apply_function(op, [](double x) { return Complex(std::cos(x)); });
  EXPECT_LE(operator_norm(r - r.adjoint()), 1e-12);
}

TEST(ApplyFunction, RejectsNonFiniteValue) {
  EXPECT_THROW(apply_function(hermitian_eig(diag({0.0, 1.0})), [](double x) { return Complex(1.0 / x); }),
               ValidationError);
}

TEST(ApplyFunction, CompositionMatchesSpectralComposition) {
  const SpectralOperator op = hermitian_eig(random_hermitian(6, 5));
  auto g = [](double x) { return 0.5 * x + 1.0; };
  auto f = [](double y) { return std::exp(Complex(0.0, -y)); };
  const ComplexMatrix composed = apply_function(op, [&](double x) { return f(g(x)); });
  // Apply g, re-diagonalize, then apply f.
  const ComplexMatrix gm = apply_function(op, [&](double x) { return Complex(g(x)); });
  const ComplexMatrix two_step = apply_function(hermitian_eig(gm), f);
  EXPECT_LE(operator_norm(composed - two_step), 1e-12);
}

TEST(ApplyFunctionCompressed, MatchesExplicitCompression) {
  const SpectralOperator op = hermitian_eig(random_hermitian(6, 8));
  const ComplexMatrix v = ComplexMatrix::Identity(6, 3);
  auto f = [](double x) { return 1.0 / Complex(1.0, x); };
  const ComplexMatrix expected = v.adjoint() * apply_function(op, f) * v;
  const ComplexMatrix got = apply_function_compressed(op, f, op.eigenvectors().adjoint() * v);
  EXPECT_LE(operator_norm(expected - got), 1e-13);
}

TEST(OperatorNorm, Basics) {
  EXPECT_EQ(operator_norm(ComplexMatrix::Zero(3, 3)), 0.0);
  EXPECT_NEAR(operator_norm(diag({1.0, -3.0})), 3.0, 1e-14);
  const ComplexMatrix q = random_matrix(5, 5, 2).householderQr().householderQ();
  const ComplexMatrix v = q.leftCols(2);
  EXPECT_NEAR(operator_norm(v * v.adjoint()), 1.0, 1e-12);
}

TEST(OperatorNorm, SubMultiplicativeOnRandomTriples) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ComplexMatrix a = random_matrix(5, 4, 3 * seed + 1);
    const ComplexMatrix b = random_matrix(4, 6, 3 * seed + 2);
    EXPECT_LE(operator_norm(a * b), operator_norm(a) * operator_norm(b) + 1e-12);
  }
}

TEST(SqrtPsd, Diagonal) {
  EXPECT_LE(operator_norm(sqrt_psd(hermitian_eig(diag({4.0, 9.0}))) - diag({2.0, 3.0})), 1e-14);
  EXPECT_EQ(operator_norm(sqrt_psd(hermitian_eig(diag({0.0, 0.0})))), 0.0);
}

TEST(SqrtPsd, ClampsTinyNegatives) {
  RealVector l(2);
  l << -1e-12, 1.0;
  const ComplexMatrix r = sqrt_psd(SpectralOperator(l, ComplexMatrix::Identity(2, 2)));
  EXPECT_LE(operator_norm(r - diag({0.0, 1.0})), 1e-15);
}

TEST(SqrtPsd, RejectsGenuinelyNegative) {
  EXPECT_THROW(sqrt_psd(hermitian_eig(diag({-1.0, 1.0}))), ValidationError);
}

TEST(SqrtPsd, SquareRecoversOperator) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ComplexMatrix a = random_matrix(7, 7, seed);
    const ComplexMatrix psd = a * a.adjoint();
    const SpectralOperator op = hermitian_eig(psd);
    const ComplexMatrix r = sqrt_psd(op);
    EXPECT_LE(operator_norm(r - r.adjoint()), 1e-12);
    EXPECT_LE(operator_norm(r * r - op.dense()), 1e-9 * std::max(1.0, op.max_eigenvalue()));
  }
}

TEST(GuardedInverse, TripsOnIllConditioning) {
  EXPECT_THROW(guarded_inverse(diag({1.0, 1e-14}), "test"), NumericalGuardError);
  const ComplexMatrix inv = guarded_inverse(diag({2.0, 4.0}), "test");
  EXPECT_LE(operator_norm(inv - diag({0.5, 0.25})), 1e-15);
}
