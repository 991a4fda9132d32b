#include <random>

#include <gtest/gtest.h>

#include "polystab/matrix_io.h"
#include "polystab/polynomial.h"
#include "test_util.h"

namespace polystab {
namespace {

using Poly = Polynomial<double>;

TEST(MonomialTest, GradedLexOrder) {
  const Monomial x1sq{2, 0}, x1x2{1, 1}, x2sq{0, 2}, x1{1, 0};
  EXPECT_LT(x1, x1sq);
  EXPECT_LT(x1sq, x1x2);
  EXPECT_LT(x1x2, x2sq);
}

TEST(MonomialTest, CountsByDegree) {
  // C(n + d, d) - C(n + dmin - 1, dmin - 1) monomials of degree dmin..d.
  EXPECT_EQ(monomials_of_degree(2, 1, 3).size(), 9u);
  EXPECT_EQ(monomials_of_degree(2, 0, 2).size(), 6u);
  EXPECT_EQ(monomials_of_degree(3, 0, 4).size(), 35u);
  EXPECT_EQ(monomials_of_degree(1, 2, 2).size(), 1u);
}

TEST(MonomialTest, DivisionAndDegree) {
  const Monomial a{2, 1}, b{1, 1};
  EXPECT_TRUE(b.divides(a));
  EXPECT_FALSE(a.divides(b));
  EXPECT_EQ(a / b, (Monomial{1, 0}));
  EXPECT_EQ((a * b).degree(), 5);
}

TEST(PolynomialTest, BinomialSquare) {
  const Poly x = Poly::variable(2, 0);
  const Poly y = Poly::variable(2, 1);
  const Poly sq = (x + y) * (x + y);
  EXPECT_EQ(sq.coefficient(Monomial{2, 0}), 1.0);
  EXPECT_EQ(sq.coefficient(Monomial{1, 1}), 2.0);
  EXPECT_EQ(sq.coefficient(Monomial{0, 2}), 1.0);
  EXPECT_EQ(sq.terms().size(), 3u);
}

TEST(PolynomialTest, CancellationDropsTerms) {
  const Poly x = Poly::variable(1, 0);
  EXPECT_TRUE((x - x).is_zero());
  EXPECT_EQ((x * x - x * x + x).terms().size(), 1u);
}

TEST(PolynomialTest, MismatchedVariablesThrow) {
  EXPECT_THROW(Poly::variable(1, 0) + Poly::variable(2, 0), ShapeError);
}

TEST(PolynomialProperty, ProductEvaluatesPointwise) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pt(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Poly a = testing::random_polynomial(rng, 2, 3);
    const Poly b = testing::random_polynomial(rng, 2, 2);
    Eigen::VectorXd x(2);
    x << pt(rng), pt(rng);
    const double expect = evaluate(a, x) * evaluate(b, x);
    EXPECT_NEAR(evaluate(a * b, x), expect, 1e-10 * (1.0 + std::abs(expect)));
    for (const auto& [m, c] : (a * b - b * a).terms()) EXPECT_NEAR(c, 0.0, 1e-14);
  }
}

TEST(PolynomialProperty, DerivativeMatchesCentralDifference) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pt(-1.5, 1.5);
  const double h = 1e-5;
  for (int trial = 0; trial < 30; ++trial) {
    const Poly a = testing::random_polynomial(rng, 2, 4);
    Eigen::VectorXd x(2);
    x << pt(rng), pt(rng);
    for (int i = 0; i < 2; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += h;
      xm(i) -= h;
      const double fd = (evaluate(a, xp) - evaluate(a, xm)) / (2.0 * h);
      EXPECT_NEAR(evaluate(a.derivative(i), x), fd, 1e-6);
    }
  }
}

TEST(MatrixPolynomialTest, JacobianOfPowerVector) {
  PolyMatrix v(2, 1, 2);
  v(0, 0) = Poly::variable(2, 0) * Poly::variable(2, 1);
  v(1, 0) = Poly::variable(2, 0) * Poly::variable(2, 0);
  const PolyMatrix j = jacobian(v);
  Eigen::VectorXd x(2);
  x << 2.0, 3.0;
  Eigen::MatrixXd expect(2, 2);
  expect << 3.0, 2.0, 4.0, 0.0;
  EXPECT_TRUE(evaluate(j, x).isApprox(expect));
}

TEST(MatrixPolynomialTest, ProductWithConstantMatrices) {
  std::mt19937_64 rng(3);
  PolyMatrix m(2, 2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 2; ++k) m(i, k) = testing::random_polynomial(rng, 2, 2);
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 2);
  Eigen::MatrixXd b = Eigen::MatrixXd::Random(2, 4);
  Eigen::VectorXd x(2);
  x << 0.3, -0.7;
  EXPECT_TRUE(evaluate(a * m * b, x).isApprox(a * evaluate(m, x) * b, 1e-12));
  EXPECT_TRUE(evaluate(m.transpose(), x).isApprox(evaluate(m, x).transpose()));
}

TEST(AffinePolynomialTest, SubstituteRecoversNumericPolynomial) {
  const Poly x = Poly::variable(1, 0);
  Polynomial<AffineExpr> p(1);
  p.add_term(Monomial{2}, AffineExpr::variable(0, 2.0) + AffineExpr(1.0));
  p.add_term(Monomial{0}, AffineExpr::variable(1));
  Eigen::VectorXd v(2);
  v << 0.5, -3.0;
  EXPECT_EQ(substitute(p, v), x * x * 2.0 - Poly::constant(1, 3.0));
}

TEST(MatrixIoTest, PolynomialJsonRoundTrip) {
  std::mt19937_64 rng(5);
  PolyMatrix m(2, 3, 2);
  for (int i = 0; i < 2; ++i) {
    for (int k = 0; k < 3; ++k) m(i, k) = testing::random_polynomial(rng, 2, 3);
  }
  EXPECT_EQ(matrix_polynomial_from_json(to_json(m)), m);
  const Eigen::MatrixXd d = Eigen::MatrixXd::Random(3, 2);
  EXPECT_EQ(matrix_from_json(to_json(d)), d);
}

TEST(MatrixIoTest, ShortestRoundTripNumbers) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}

}  // namespace
}  // namespace polystab
