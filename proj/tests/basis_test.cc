#include <gtest/gtest.h>

#include "polystab/basis.h"
#include "polystab/systems.h"

namespace polystab {
namespace {

using Poly = Polynomial<double>;

TEST(BasisTest, VanderpolFactorization) {
  const BasisSpec spec = default_basis("vanderpol");
  EXPECT_EQ(spec.N(), 9);
  EXPECT_EQ(spec.p(), 2);
  EXPECT_EQ(spec.q(), 1);
  EXPECT_EQ(spec.H.rows(), 9);
  EXPECT_EQ(spec.H.cols(), 2);
  EXPECT_EQ(spec.H * spec.Zhat, spec.Z);
  EXPECT_TRUE(validate_basis(spec).ok());
  EXPECT_TRUE(spec.input_field_constant());
}

TEST(BasisTest, HRowOfCubeUsesSquare) {
  // x2^3 = (x2^2) * x2, so the H row of x2^3 holds x2^2 in the x2 column.
  const BasisSpec spec = default_basis("vanderpol");
  const Poly x2 = Poly::variable(2, 1);
  int row = -1;
  for (int i = 0; i < spec.N(); ++i) {
    if (spec.Z(i, 0) == x2 * x2 * x2) row = i;
  }
  ASSERT_GE(row, 0);
  EXPECT_EQ(spec.H(row, 1), x2 * x2);
  EXPECT_TRUE(spec.H(row, 0).is_zero());
}

TEST(BasisTest, PowerVectorOrder) {
  const PolyMatrix z = build_power_vector(2, 1, 2);
  ASSERT_EQ(z.rows(), 5);
  EXPECT_EQ(z(0, 0), Poly::variable(2, 0));
  EXPECT_EQ(z(1, 0), Poly::variable(2, 1));
  EXPECT_EQ(z(2, 0), Poly::variable(2, 0) * Poly::variable(2, 0));
}

TEST(BasisTest, FactorizeFailsWithoutDivisor) {
  PolyMatrix z(1, 1, 2);
  z(0, 0) = Poly::variable(2, 1);
  PolyMatrix zhat(1, 1, 2);
  zhat(0, 0) = Poly::variable(2, 0);
  EXPECT_THROW(factorize(z, zhat), FactorizationError);
}

TEST(BasisTest, ConstantInZFailsValidation) {
  BasisSpec spec = BasisSpec::from_degrees(1, 1, 1, 2);
  spec.Z(0, 0) = spec.Z(0, 0) + Poly::constant(1, 1.0);
  EXPECT_FALSE(validate_basis(spec).ok());
}

TEST(BasisTest, ScalarCubicBasis) {
  const BasisSpec spec = default_basis("scalar-cubic");
  EXPECT_EQ(spec.N(), 3);
  EXPECT_EQ(spec.p(), 1);
  const LinearLikeForm llf = linear_like_form(builtin_system("scalar-cubic"), spec);
  EXPECT_EQ(llf.A, (Eigen::MatrixXd(1, 3) << 0.0, 0.0, 1.0).finished());
  EXPECT_EQ(llf.B, Eigen::MatrixXd::Ones(1, 1));
}

}  // namespace
}  // namespace polystab
