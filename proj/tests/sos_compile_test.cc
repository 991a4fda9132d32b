#include <random>

#include <gtest/gtest.h>

#include "polystab/errors.h"
#include "polystab/sos_program.h"
#include "test_util.h"

namespace polystab {
namespace {

using Poly = Polynomial<double>;
using PolyMat = MatrixPolynomial<double>;

PolyMat one_by_one(const Poly& p) {
  PolyMat m(1, 1, p.nvars());
  m(0, 0) = p;
  return m;
}

// zᵀQz rebuilt from the Gram block of constraint g.
PolyMat gram_product(const SosProgram& prog, const SDPInstance& inst, int g,
                     const Eigen::VectorXd& v) {
  const GramConstraint& gc = prog.gram_constraints()[g];
  PolyMat out(gc.r, gc.r, prog.nvars());
  if (gc.block < 0) return out;
  const Eigen::MatrixXd q = inst.block_matrix(gc.block, v);
  for (size_t p = 0; p < gc.kept.size(); ++p) {
    for (size_t s = 0; s < gc.kept.size(); ++s) {
      const auto [k1, a1] = gc.kept[p];
      const auto [k2, a2] = gc.kept[s];
      out(a1, a2).add_term(gc.basis[k1] * gc.basis[k2], q(p, s));
    }
  }
  return out;
}

TEST(SosCompileTest, PolynomialMatrixIsSos) {
  // [[1, x], [x, x^2 + 1]] = [1 0; x 1]ᵀ-style factor, SOS.
  const Poly x = Poly::variable(1, 0);
  PolyMat m(2, 2, 1);
  m(0, 0) = Poly::constant(1, 1.0);
  m(0, 1) = x;
  m(1, 0) = x;
  m(1, 1) = x * x + Poly::constant(1, 1.0);
  const SolveReport r = testing::solve_sos(lift<AffineExpr>(m));
  EXPECT_TRUE(is_success(r.status)) << r.message;
}

TEST(SosCompileTest, NegativeConstantIsNotSos) {
  const SolveReport r = testing::solve_sos(lift<AffineExpr>(one_by_one(Poly::constant(1, -1.0))));
  EXPECT_EQ(r.status, SolveStatus::kInfeasible) << r.message;
}

TEST(SosCompileTest, MotzkinIsNotSos) {
  const Poly x = Poly::variable(2, 0), y = Poly::variable(2, 1);
  const Poly motzkin = x * x * x * x * y * y + x * x * y * y * y * y - 3.0 * x * x * y * y +
                       Poly::constant(2, 1.0);
  const SolveReport r = testing::solve_sos(lift<AffineExpr>(one_by_one(motzkin)));
  EXPECT_FALSE(is_success(r.status)) << r.message;
}

TEST(SosCompileTest, OddPolynomialIsStructurallyInfeasible) {
  SosProgram prog(1);
  prog.add_sos_matrix("x", lift<AffineExpr>(one_by_one(Poly::variable(1, 0))));
  EXPECT_THROW(prog.compile(), StructuralInfeasibility);
}

TEST(SosCompileTest, InconsistentEqualityIsStructurallyInfeasible) {
  SosProgram prog(0);
  prog.new_free("a", 1);
  prog.add_equality("a", prog.free_var(0));
  prog.add_equality("b", prog.free_var(0) - AffineExpr(1.0));
  EXPECT_THROW(prog.compile(), StructuralInfeasibility);
}

TEST(SosCompileTest, RejectsNonSymmetricAndNonSquare) {
  const Poly x = Poly::variable(1, 0);
  PolyMat m(2, 2, 1);
  m(0, 1) = x;
  SosProgram prog(1);
  EXPECT_THROW(prog.add_sos_matrix("asym", lift<AffineExpr>(m)), ShapeError);
  EXPECT_THROW(prog.add_sos_matrix("rect", lift<AffineExpr>(PolyMat(2, 1, 1))), ShapeError);
  EXPECT_THROW(prog.add_sos_matrix("vars", lift<AffineExpr>(PolyMat(1, 1, 2))), ShapeError);
}

TEST(SosCompileTest, HalfDegreeBasisUsesPresentVariables) {
  // y does not occur, so the basis only has powers of x.
  const Poly x = Poly::variable(2, 0);
  const auto basis = half_degree_basis(lift<AffineExpr>(one_by_one(x * x * x * x)));
  EXPECT_EQ(basis.size(), 3u);
  for (const auto& m : basis) EXPECT_EQ(m[1], 0);
}

TEST(SosCompileTest, GramPruningDropsForcedZeroRows) {
  // x^2 over basis {1, x}: the constant row has no diagonal term.
  SosProgram prog(1);
  const Poly x = Poly::variable(1, 0);
  prog.add_sos_matrix("xsq", lift<AffineExpr>(one_by_one(x * x)));
  const GramConstraint& g = prog.gram_constraints()[0];
  ASSERT_EQ(g.kept.size(), 1u);
  EXPECT_EQ(g.basis[g.kept[0].first], (Monomial{1}));
}

TEST(SosCompileProperty, RandomGramFactorsAreSosAndReconstruct) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pt(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    // M = LᵀL + 0.1 I, L a random 2x2 matrix of degree-1 polynomials.
    PolyMat l(2, 2, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) l(i, j) = testing::random_polynomial(rng, 2, 1);
    const PolyMat m = l.transpose() * l + PolyMat::identity(2, 2) * 0.1;
    SosProgram prog(2);
    const int g = prog.add_sos_matrix("m", lift<AffineExpr>(m));
    const SDPInstance inst = prog.compile();
    const SolveReport r = solve(inst);
    ASSERT_TRUE(is_success(r.status)) << "trial " << trial << ": " << r.message;
    const PolyMat back = gram_product(prog, inst, g, r.v);
    Eigen::VectorXd x(2);
    x << pt(rng), pt(rng);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        EXPECT_NEAR(evaluate(back(i, j), x), evaluate(m(i, j), x), 1e-6);
  }
}

}  // namespace
}  // namespace polystab
