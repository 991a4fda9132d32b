#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "polystab/errors.h"
#include "polystab/matrix_io.h"
#include "polystab/pipeline.h"
#include "polystab/verify.h"
#include "test_util.h"

namespace polystab {
namespace {

using Poly = Polynomial<double>;

// V = x'x on the Van der Pol basis with a constant gain.
Certificate vanderpol_certificate(double k1, double k2) {
  Certificate c;
  c.method = Method::kCor1;
  c.n = 2;
  c.m = 1;
  c.P = Eigen::Matrix2d::Identity();
  c.P_inv = c.P;
  c.P_condition = 1.0;
  c.Zhat = default_basis("vanderpol").Zhat;
  c.F = PolyMatrix(1, 2, 2);
  c.F(0, 0) = Poly::constant(2, k1);
  c.F(0, 1) = Poly::constant(2, k2);
  c.YorK = c.F;
  c.eps1 = Poly::constant(2, 1e-3);
  c.eps2 = Poly::constant(2, 1.0);
  c.rho = 1e-3;
  c.delta = 1e-6;
  c.solver_status = "optimal";
  return c;
}

MethodOutcome scalar_outcome(const std::string& system, Method m) {
  SynthesisProblem pr{m, default_basis(system), testing::exact_scalar_data(system), {}};
  return run_method(pr, {});
}

TEST(VerifyTest, OpenLoopVanderpolFailsAudit) {
  const GroundTruth gt = builtin_system("vanderpol");
  AuditOptions opts;
  opts.samples = 2000;
  const AuditReport a = lyapunov_audit(vanderpol_certificate(0.0, 0.0), gt, opts);
  EXPECT_FALSE(a.passed);
  EXPECT_GT(a.max_vdot, 0.0);
  EXPECT_LT(a.fraction_negative(), 1.0);
  EXPECT_GT(a.min_v_normalized, 0.0);
}

TEST(VerifyTest, LyapunovDerivativeMatchesFiniteDifference) {
  const GroundTruth gt = builtin_system("vanderpol");
  Certificate c = vanderpol_certificate(-1.0, -3.0);
  c.P << 2.0, 0.3, 0.3, 1.0;
  c.P_inv = c.P.inverse();
  c.F(0, 0) = c.F(0, 0) + Poly::variable(2, 0) * Poly::variable(2, 1);
  const Poly vdot = lyapunov_derivative(c, gt);
  const PolyMatrix field = closed_loop_field(c, gt);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pt(-2.0, 2.0);
  const double h = 1e-6;
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::VectorXd x(2);
    x << pt(rng), pt(rng);
    const Eigen::VectorXd f = evaluate(field, x);
    const double fd = (c.V(x + h * f) - c.V(x - h * f)) / (2 * h);
    EXPECT_NEAR(evaluate(vdot, x), fd, 1e-5 * (1.0 + std::abs(fd)));
  }
}

TEST(VerifyTest, OpenLoopVanderpolReachesLimitCycle) {
  const GroundTruth gt = builtin_system("vanderpol");
  Eigen::VectorXd x0(2);
  x0 << 0.1, 0.0;
  const Trajectory tr = simulate_closed_loop(vanderpol_certificate(0.0, 0.0), gt, x0, 60.0, 0.01);
  ASSERT_FALSE(tr.diverged);
  double amp = 0.0;
  for (size_t k = tr.x.size() / 2; k < tr.x.size(); ++k) amp = std::max(amp, std::abs(tr.x[k](0)));
  EXPECT_NEAR(amp, 2.0, 0.05);
}

TEST(VerifyTest, OriginIsAnEquilibrium) {
  const GroundTruth gt = builtin_system("vanderpol");
  const Trajectory tr =
      simulate_closed_loop(vanderpol_certificate(-1.0, -1.0), gt, Eigen::Vector2d::Zero(), 5.0, 0.1);
  EXPECT_EQ(tr.final_norm(), 0.0);
  EXPECT_EQ(tr.max_v_increase(), 0.0);
}

TEST(VerifyTest, DivergenceIsFlagged) {
  // xdot = x^3 + u with u = +x blows up from x0 = 2.
  const GroundTruth gt = builtin_system("scalar-cubic");
  Certificate c = vanderpol_certificate(0.0, 0.0);
  c.n = 1;
  c.P = c.P_inv = Eigen::MatrixXd::Identity(1, 1);
  c.Zhat = default_basis("scalar-cubic").Zhat;
  c.F = PolyMatrix(1, 1, 1);
  c.F(0, 0) = Poly::constant(1, 1.0);
  const Trajectory tr = simulate_closed_loop(c, gt, Eigen::VectorXd::Constant(1, 2.0), 5.0, 0.01);
  EXPECT_TRUE(tr.diverged);
  EXPECT_GT(tr.escape_time, 0.0);
  EXPECT_LT(tr.escape_time, 1.0);
}

TEST(VerifyTest, ControllerMatchesDataParametrization) {
  // F P = U0 Y for methods built from Y.
  const MethodOutcome out = scalar_outcome("linear1d", Method::kThm2);
  ASSERT_TRUE(out.certificate.has_value()) << out.message;
  const Certificate& c = *out.certificate;
  const DataSet ds = testing::exact_scalar_data("linear1d");
  const PolyMatrix lhs = c.F * PolyMatrix::constant(c.P, 1);
  const PolyMatrix rhs = PolyMatrix::constant(ds.U0, 1) * c.YorK;
  const PolyMatrix diff = lhs - rhs;
  for (const auto& [m, coef] : diff(0, 0).terms()) EXPECT_NEAR(coef, 0.0, 1e-9);
}

TEST(VerifyTest, CertificateJsonRoundTripIsByteStable) {
  const MethodOutcome out = scalar_outcome("scalar-cubic", Method::kCor1);
  ASSERT_TRUE(out.certificate.has_value()) << out.message;
  const std::string text = dump_certificate(*out.certificate);
  const Certificate back = certificate_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(dump_certificate(back), text);
  EXPECT_TRUE(back.P_inv.isApprox(out.certificate->P_inv, 1e-12));
  EXPECT_EQ(text.find("time"), std::string::npos);
  EXPECT_EQ(dump_certificate(*scalar_outcome("scalar-cubic", Method::kCor1).certificate), text);
}

TEST(VerifyTest, MalformedCertificateThrows) {
  nlohmann::json j = to_json(vanderpol_certificate(-1.0, -1.0));
  EXPECT_NO_THROW(certificate_from_json(j));
  j["P"] = to_json(Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3)));
  EXPECT_THROW(certificate_from_json(j), FormatError);
  nlohmann::json k = to_json(vanderpol_certificate(-1.0, -1.0));
  k.erase("F");
  EXPECT_THROW(certificate_from_json(k), FormatError);
}

TEST(VerifyTest, SolvedConditionIsPositiveOnSamples) {
  const MethodOutcome out = scalar_outcome("integrator", Method::kLsq);
  ASSERT_TRUE(out.certificate.has_value()) << out.message;
  const double eig = condition_min_eigenvalue(*out.certificate, halton_points(1, 50, 2.0));
  EXPECT_GT(eig, 0.0);
  AuditOptions opts;
  opts.samples = 100;
  // The origin is replaced, so exactly 100 nonzero points are checked.
  EXPECT_EQ(lyapunov_audit(*out.certificate, builtin_system("integrator"), opts).samples, 100);
}

TEST(HaltonTest, PointsFillTheBox) {
  const auto pts = halton_points(2, 1000, 3.0);
  ASSERT_EQ(pts.size(), 1000u);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) {
    EXPECT_LE(p.cwiseAbs().maxCoeff(), 3.0);
    mean += p / 1000.0;
  }
  EXPECT_LT(mean.norm(), 0.05);
  EXPECT_EQ(halton_points(2, 5, 1.0, 3)[0], halton_points(2, 5, 1.0)[2]);
  EXPECT_NEAR(halton_points(1, 1, 1.0)[0](0), 0.0, 1e-15);
}

TEST(RingTest, PointsLieOnTheBoundary) {
  const auto ring = boundary_ring(2, 3.0, 10);
  ASSERT_EQ(ring.size(), 10u);
  for (size_t i = 0; i < ring.size(); ++i) {
    EXPECT_NEAR(ring[i].cwiseAbs().maxCoeff(), 3.0, 1e-12);
    for (size_t j = 0; j < i; ++j) EXPECT_GT((ring[i] - ring[j]).norm(), 1.0);
  }
  const auto line = boundary_ring(1, 2.0, 10);
  ASSERT_EQ(line.size(), 2u);
  EXPECT_EQ(line[0](0), -2.0);
  EXPECT_EQ(line[1](0), 2.0);
}

TEST(TrajectoryTest, CsvHeaderAndRows) {
  const GroundTruth gt = builtin_system("vanderpol");
  const Trajectory tr = simulate_closed_loop(vanderpol_certificate(-1.0, -2.0), gt,
                                             Eigen::Vector2d(0.5, 0.0), 1.0, 0.5);
  const std::string csv = trajectory_csv(tr);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,x1,x2,u1,V");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + static_cast<long>(tr.t.size()));
}

TEST(ReportTest, TimeOrdering) {
  EXPECT_EQ(compare_times(1.0, 2.0), Ordering::kPass);
  EXPECT_EQ(compare_times(2.0, 1.0), Ordering::kFail);
  EXPECT_EQ(compare_times(1.0, 1.02), Ordering::kInconclusive);
  EXPECT_EQ(to_string(Ordering::kNotApplicable), "n/a");
}

TEST(ReportTest, TableRowsAndOrdering) {
  MethodRow thm2{Method::kThm2, "optimal", 825, 30, 0.7, -0.1, true, 10, 10};
  MethodRow cor1{Method::kCor1, "optimal", 693, 28, 0.3, -0.2, true, 10, 10};
  const ComparisonReport both = make_report({thm2, cor1});
  EXPECT_EQ(both.cor1_faster_than_thm2, Ordering::kPass);
  EXPECT_NE(both.table().find("cor1 faster than thm2: pass"), std::string::npos);
  EXPECT_NE(both.table().find("825"), std::string::npos);

  MethodRow infeasible{Method::kLsq, "infeasible", 1062, 40, 0.5, {}, {}, {}, 0};
  const ComparisonReport one = make_report({infeasible});
  EXPECT_EQ(one.rows.size(), 1u);
  EXPECT_EQ(one.cor1_faster_than_thm2, Ordering::kNotApplicable);
  EXPECT_NE(one.table().find("infeasible"), std::string::npos);
}

TEST(PipelineTest, VerificationCountsConvergedTrajectories) {
  SynthesisProblem pr{Method::kCor1, default_basis("linear1d"),
                      testing::exact_scalar_data("linear1d"), {}};
  const GroundTruth gt = builtin_system("linear1d");
  VerifyOptions vo;
  vo.audit.samples = 200;
  vo.t_end = 40.0;
  const MethodOutcome out = run_method(pr, {}, &gt, vo);
  ASSERT_TRUE(out.verification.has_value()) << out.message;
  EXPECT_EQ(out.verification->trajectories.size(), 2u);
  EXPECT_EQ(out.verification->converged, 2);
  EXPECT_TRUE(out.verification->passed());
  const MethodRow row = out.row();
  EXPECT_EQ(row.trajectories_converged, 2);
  EXPECT_EQ(row.audit_passed, true);
}

}  // namespace
}  // namespace polystab
