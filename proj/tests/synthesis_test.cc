#include <cmath>

#include <gtest/gtest.h>

#include "polystab/errors.h"
#include "polystab/pipeline.h"
#include "polystab/synthesis.h"
#include "test_util.h"

namespace polystab {
namespace {

constexpr Method kAllMethods[] = {Method::kThm1, Method::kRemark1, Method::kThm2, Method::kCor1,
                                  Method::kLsq};

SynthesisProblem vanderpol_problem(Method m) {
  SynthesisProblem pr{m, default_basis("vanderpol"), testing::vanderpol_data(std::sqrt(0.1)), {}};
  pr.data = with_input_bound(pr.data, Eigen::MatrixXd::Ones(2, 1));
  return pr;
}

TEST(SynthesisTest, MethodNamesRoundTrip) {
  for (Method m : kAllMethods) EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_THROW(parse_method("thm3"), ConfigError);
}

TEST(SynthesisTest, EqualityConstraintPerMethod) {
  for (Method m : kAllMethods) {
    const SosSynthesis syn = build(vanderpol_problem(m));
    EXPECT_EQ(syn.equality.has_value(), has_equality_constraint(m)) << to_string(m);
    EXPECT_EQ(syn.YorK.rows(), m == Method::kCor1 ? 1 : 12) << to_string(m);
    EXPECT_EQ(syn.YorK.cols(), 2);
  }
  EXPECT_FALSE(has_equality_constraint(Method::kCor1));
}

TEST(SynthesisTest, BlockSizesPerMethod) {
  // p = 2, q = 1, N = 9, T = 12.
  EXPECT_EQ(build(vanderpol_problem(Method::kThm1)).condition.rows(), 2 + 1 + 12);
  EXPECT_EQ(build(vanderpol_problem(Method::kRemark1)).condition.rows(), 2 + 12);
  EXPECT_EQ(build(vanderpol_problem(Method::kThm2)).condition.rows(), 2 + 1 + 9);
  EXPECT_EQ(build(vanderpol_problem(Method::kCor1)).condition.rows(), 2 + 1 + 9);
  EXPECT_EQ(build(vanderpol_problem(Method::kLsq)).condition.rows(), 2 + 12);
}

TEST(SynthesisTest, Cor1HasFewerVariablesThanThm2) {
  const SosSynthesis thm2 = build(vanderpol_problem(Method::kThm2));
  const SosSynthesis cor1 = build(vanderpol_problem(Method::kCor1));
  const VariableCounts a = thm2.counts(), b = cor1.counts();
  EXPECT_LT(b.total, a.total);
  EXPECT_LT(b.YorK, a.YorK);
  EXPECT_EQ(a.P, b.P);
  EXPECT_EQ(a.total, thm2.program.compile().num_vars);
  EXPECT_EQ(b.total, cor1.program.compile().num_vars);
  EXPECT_EQ(a.P, 3);
}

TEST(SynthesisTest, ScaffoldOrderIsShared) {
  // P first, then Y or K, so the leading variables line up.
  const SosSynthesis thm2 = build(vanderpol_problem(Method::kThm2));
  const SosSynthesis lsq = build(vanderpol_problem(Method::kLsq));
  EXPECT_EQ(thm2.p_block, lsq.p_block);
  EXPECT_EQ(thm2.YorK(0, 0), lsq.YorK(0, 0));
}

TEST(SynthesisTest, Thm1NeedsInputBound) {
  SynthesisProblem pr{Method::kThm1, default_basis("vanderpol"),
                      testing::vanderpol_data(0.3), {}};
  EXPECT_THROW(build(pr), ConfigError);
}

TEST(SynthesisTest, Remark1NeedsIdentityInputMonomials) {
  PolyMatrix w(2, 1, 1);
  w(0, 0) = Polynomial<double>::constant(1, 1.0);
  w(1, 0) = Polynomial<double>::variable(1, 0);
  const BasisSpec spec = BasisSpec::from_degrees(1, 1, 1, 1, w);
  Eigen::VectorXd x0(1);
  x0 << 0.2;
  DataSet ds = simulate_experiment(builtin_system("linear1d"), spec, x0,
                                   make_input_signal("sin", 1), 0.0, 0.1, 8, NoiseModel{});
  SynthesisProblem pr{Method::kRemark1, spec, with_snr_bound(ds, 0.1), {}};
  EXPECT_THROW(build(pr), ConfigError);
  pr.method = Method::kThm2;
  EXPECT_NO_THROW(build(pr));
}

TEST(SynthesisTest, Thm1ReducesToRemark1) {
  // W = I and RB = 0: the q rows of the thm1 block decouple and carry only
  // eps2, and the rest is the remark1 block.
  DataSet ds = testing::vanderpol_data(0.3);
  ds = with_input_bound(ds, Eigen::MatrixXd::Zero(2, 1));
  const SosSynthesis thm1 = build({Method::kThm1, default_basis("vanderpol"), ds, {}});
  const SosSynthesis rem1 = build({Method::kRemark1, default_basis("vanderpol"), ds, {}});
  const int p = 2, q = 1, T = 12;
  ASSERT_EQ(thm1.condition.rows(), p + q + T);
  std::vector<int> keep;
  for (int i = 0; i < p + q + T; ++i)
    if (i < p || i >= p + q) keep.push_back(i);
  for (int i = 0; i < p + T; ++i)
    for (int j = 0; j < p + T; ++j)
      EXPECT_EQ(thm1.condition(keep[i], keep[j]), rem1.condition(i, j)) << i << "," << j;
  for (int j = 0; j < p + q + T; ++j) {
    if (j == p) {
      EXPECT_EQ(thm1.condition(p, p), thm1.eps2);
    } else {
      EXPECT_TRUE(thm1.condition(p, j).is_zero()) << j;
    }
  }
}

TEST(SynthesisTest, OptionChecks) {
  SynthesisProblem pr = vanderpol_problem(Method::kCor1);
  pr.opts.deg_eps1 = 3;
  EXPECT_THROW(check_options(pr), ConfigError);
  pr.opts = {};
  pr.opts.deg_eps2 = 1;
  EXPECT_THROW(check_options(pr), ConfigError);
  pr.opts = {};
  pr.opts.rho = 0.0;
  EXPECT_THROW(check_options(pr), ConfigError);
  pr.opts = {};
  pr.opts.deg_y = -1;
  EXPECT_THROW(check_options(pr), ConfigError);
  pr.opts = {};
  pr.data.RD = Eigen::MatrixXd::Zero(3, 12);
  EXPECT_THROW(check_options(pr), ShapeError);
}

TEST(SynthesisTest, LeastSquaresRecoversScaledModel) {
  // D0 = 0.05 X1 exactly, so X1 = 1.05 [B A] W0 and S* = 1.05 [B A].
  const GroundTruth gt = builtin_system("vanderpol");
  const BasisSpec spec = default_basis("vanderpol");
  const LinearLikeForm llf = linear_like_form(gt, spec);
  Eigen::MatrixXd ba(2, 10);
  ba << llf.B, llf.A;
  const Eigen::MatrixXd s = least_squares_model(testing::vanderpol_data(0.3));
  EXPECT_TRUE(s.isApprox(1.05 * ba, 1e-8)) << s;
}

TEST(SynthesisTest, PseudoInverseProperties) {
  Eigen::MatrixXd m(3, 2);
  m << 1, 2, 2, 4, 0, 0;  // rank 1
  const Eigen::MatrixXd pi = pseudo_inverse(m);
  EXPECT_TRUE((m * pi * m).isApprox(m, 1e-12));
  EXPECT_TRUE((pi * m * pi).isApprox(pi, 1e-12));
  EXPECT_TRUE((m * pi).transpose().isApprox(m * pi, 1e-12));
}

class ScalarSynthesisTest : public ::testing::TestWithParam<std::tuple<std::string, Method>> {};

TEST_P(ScalarSynthesisTest, NoiselessDataGivesStabilizingController) {
  const auto& [system, method] = GetParam();
  SynthesisProblem pr{method, default_basis(system), testing::exact_scalar_data(system), {}};
  const GroundTruth gt = builtin_system(system);
  VerifyOptions vo;
  vo.audit.box = 1.0;
  vo.audit.samples = 500;
  const MethodOutcome out = run_method(pr, {}, &gt, vo);
  ASSERT_TRUE(out.certificate.has_value()) << out.status << ": " << out.message;
  EXPECT_TRUE(out.certificate->violations.empty());
  EXPECT_GE(out.certificate->P.minCoeff(), pr.opts.rho - 1e-8);
  ASSERT_TRUE(out.verification.has_value());
  EXPECT_TRUE(out.verification->audit.passed);
  EXPECT_GT(out.verification->audit.condition_min_eig, 0.0);
  EXPECT_TRUE(out.success());
  if (has_equality_constraint(method)) {
    EXPECT_LE(*out.certificate->equality_residual, 1e-6);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Systems, ScalarSynthesisTest,
    ::testing::Combine(::testing::Values("linear1d", "scalar-cubic", "integrator"),
                       ::testing::Values(Method::kRemark1, Method::kThm2, Method::kCor1,
                                         Method::kLsq)),
    [](const auto& info) {
      std::string s = std::get<0>(info.param) + "_" + to_string(std::get<1>(info.param));
      for (char& c : s)
        if (c == '-') c = '_';
      return s;
    });

TEST(SynthesisTest, ConstantGainForIntegrator) {
  SynthesisProblem pr{Method::kCor1, default_basis("integrator"),
                      testing::exact_scalar_data("integrator"), {}};
  pr.opts.deg_y = 0;
  const SosSynthesis syn = build(pr);
  const SolveReport r = solve(syn.program.compile());
  ASSERT_TRUE(is_success(r.status)) << r.message;
  const Certificate c = extract(pr, syn, r);
  EXPECT_EQ(c.F.degree(), 0);
  EXPECT_LT(c.F(0, 0).coefficient(Monomial{0}), 0.0);
}

TEST(SynthesisTest, LargeNoiseBoundIsInfeasible) {
  for (Method m : {Method::kRemark1, Method::kThm2, Method::kCor1, Method::kLsq}) {
    SynthesisProblem pr = vanderpol_problem(m);
    pr.data = with_snr_bound(pr.data, 1000.0);
    const MethodOutcome out = run_method(pr, {});
    EXPECT_FALSE(out.certificate.has_value()) << to_string(m);
    EXPECT_EQ(out.status, "infeasible") << to_string(m) << ": " << out.message;
  }
}

}  // namespace
}  // namespace polystab
