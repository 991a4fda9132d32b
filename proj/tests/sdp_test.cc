#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "polystab/errors.h"
#include "polystab/sdp.h"
#include "polystab/sdp_solver.h"
#include "polystab/sos_program.h"

namespace polystab {
namespace {

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  return 0.5 * (m + m.transpose());
}

TEST(SvecTest, RoundTripAndIsometry) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 6; ++n) {
    const Eigen::MatrixXd a = random_symmetric(rng, n);
    const Eigen::MatrixXd b = random_symmetric(rng, n);
    EXPECT_EQ(svec(a).size(), svec_size(n));
    EXPECT_TRUE(smat(svec(a), n).isApprox(a, 1e-14));
    // <A, B> = svec(A) . svec(B)
    EXPECT_NEAR(svec(a).dot(svec(b)), (a * b).trace(), 1e-12);
  }
}

TEST(SvecTest, IndexIsSymmetricAndDense) {
  const int n = 4;
  std::vector<int> seen(svec_size(n), 0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      EXPECT_EQ(svec_index(n, i, j), svec_index(n, j, i));
      if (i >= j) ++seen[svec_index(n, i, j)];
    }
  for (int s : seen) EXPECT_EQ(s, 1);
  EXPECT_THROW(smat(Eigen::VectorXd::Zero(5), 3), ShapeError);
}

// min X00 s.t. X01 = 1, X00 = X11, X PSD, plus a free shift.
SDPInstance small_instance() {
  SosProgram prog(0);
  const int k = prog.new_psd("X", 2);
  const int f = prog.new_free("t", 1);
  prog.add_equality("off", prog.psd_entry(k, 0, 1) - AffineExpr(1.0));
  prog.add_equality("diag", prog.psd_entry(k, 0, 0) - prog.psd_entry(k, 1, 1));
  prog.add_equality("shift", prog.free_var(f) - prog.psd_entry(k, 0, 0) + AffineExpr(0.5));
  prog.minimize(prog.free_var(f));
  return prog.compile();
}

TEST(SdpaTest, WriteParseKeepsOptimum) {
  const SDPInstance inst = small_instance();
  EXPECT_NO_THROW(inst.validate());
  EXPECT_EQ(inst.free_indices().size(), 1u);
  const std::string text = to_sdpa(inst);
  const SDPInstance back = parse_sdpa(text);
  EXPECT_EQ(back.num_equalities(), inst.num_equalities());
  // The free variable is split into two LP entries.
  EXPECT_EQ(back.num_vars, inst.num_vars + 1);
  const SolveReport a = solve(inst);
  const SolveReport b = solve(back);
  ASSERT_TRUE(is_success(a.status)) << a.message;
  ASSERT_TRUE(is_success(b.status)) << b.message;
  EXPECT_NEAR(inst.c.dot(a.v), 0.5, 1e-6);
  EXPECT_NEAR(back.c.dot(b.v), 0.5, 1e-6);
  EXPECT_EQ(to_sdpa(inst), text);
}

TEST(SdpaTest, PsdOnlyRoundTripIsExact) {
  SosProgram prog(0);
  const int k = prog.new_psd("X", 3);
  prog.add_equality("tr", prog.psd_entry(k, 0, 0) + prog.psd_entry(k, 1, 1) +
                              prog.psd_entry(k, 2, 2) - AffineExpr(1.0));
  prog.add_equality("o", prog.psd_entry(k, 0, 2) - AffineExpr(0.25));
  prog.minimize(prog.psd_entry(k, 1, 2) * 2.0);
  const SDPInstance inst = prog.compile();
  const SDPInstance back = parse_sdpa(to_sdpa(inst));
  ASSERT_EQ(back.num_vars, inst.num_vars);
  EXPECT_TRUE(Eigen::MatrixXd(back.A).isApprox(Eigen::MatrixXd(inst.A), 1e-15));
  EXPECT_TRUE(back.b.isApprox(inst.b));
  EXPECT_TRUE(back.c.isApprox(inst.c, 1e-15));
}

TEST(SdpaTest, MalformedInputThrows) {
  EXPECT_THROW(parse_sdpa("garbage"), FormatError);
  EXPECT_THROW(parse_sdpa("1\n1\n2\n1\n0 1 3 3 1\n"), FormatError);
}

}  // namespace
}  // namespace polystab
