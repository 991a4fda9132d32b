#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "polystab/experiment.h"
#include "polystab/sdp_solver.h"
#include "polystab/synthesis.h"

namespace polystab {

/// A solved synthesis: controller u = F(x)Ẑ(x) and Lyapunov function
/// V(x) = Ẑ(x)ᵀP⁻¹Ẑ(x).
struct Certificate {
  Method method = Method::kCor1;
  int n = 0;
  int m = 0;
  Eigen::MatrixXd P;
  Eigen::MatrixXd P_inv;
  double P_condition = 0.0;
  PolyMatrix Zhat;   // p×1
  PolyMatrix YorK;   // T×p or m×p
  PolyMatrix F;      // m×p
  Polynomial<double> eps1;
  Polynomial<double> eps2;
  /// The block condition at the solution; empty for loaded certificates.
  PolyMatrix condition;
  /// Largest |coefficient| of Z₀Y(x) − H(x)P, when the method has it.
  std::optional<double> equality_residual;
  double rho = 0.0;
  double delta = 0.0;
  int decision_variables = 0;
  std::string solver_status;
  int solver_iterations = 0;
  /// Broken invariants found by extract (empty when sound).
  std::vector<std::string> violations;

  double V(const Eigen::VectorXd& x) const;
  Eigen::VectorXd u(const Eigen::VectorXd& x) const;
};

/// Throws ConfigError unless the report is a success, and
/// IllConditionedCertificate when cond(P) > 1e12.
Certificate extract(const SynthesisProblem& problem, const SosSynthesis& synthesis,
                    const SolveReport& report);

nlohmann::json to_json(const Certificate& cert);
Certificate certificate_from_json(const nlohmann::json& j);
/// Shortest-roundtrip number formatting, so equal certificates give equal
/// bytes.
std::string dump_certificate(const Certificate& cert);

/// Halton points in [−box, box]ⁿ (bases 2, 3, 5, ...), skipping the first
/// `skip` points of the sequence.
std::vector<Eigen::VectorXd> halton_points(int n, int count, double box, int skip = 1);

/// ẋ = f(x) + g(x)F(x)Ẑ(x) as a column of polynomials.
PolyMatrix closed_loop_field(const Certificate& cert, const GroundTruth& gt);
/// V̇(x) = 2Ẑᵀ P⁻¹ (∂Ẑ/∂x) ẋ, built symbolically.
Polynomial<double> lyapunov_derivative(const Certificate& cert, const GroundTruth& gt);

struct AuditOptions {
  double box = 3.0;
  int samples = 10000;  // nonzero points
  int condition_samples = 200;
  /// V̇ must be ≤ −margin·‖Ẑ(x)‖².
  double margin = 1e-12;
};

struct AuditReport {
  int samples = 0;
  int negative = 0;   // samples with V̇ ≤ −margin·‖Ẑ‖²
  double max_vdot = 0.0;
  double max_normalized_vdot = 0.0;  // max V̇/‖Ẑ‖²
  Eigen::VectorXd worst_point;
  double min_v_normalized = 0.0;     // min V/‖Ẑ‖², positive iff V > 0
  /// min over samples of λ_min(condition(x)); NaN when not available.
  double condition_min_eig = 0.0;
  bool passed = false;
  double fraction_negative() const {
    return samples ? static_cast<double>(negative) / samples : 0.0;
  }
};

AuditReport lyapunov_audit(const Certificate& cert, const GroundTruth& gt,
                           const AuditOptions& opts = {});

/// min over points of λ_min of the solved block condition.
double condition_min_eigenvalue(const Certificate& cert,
                                const std::vector<Eigen::VectorXd>& points);

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;
  std::vector<double> V;
  bool diverged = false;
  double escape_time = 0.0;

  double final_norm() const { return x.empty() ? 0.0 : x.back().norm(); }
  /// Largest increase V[k+1] − V[k] along the samples.
  double max_v_increase() const;
};

/// RK4 with fixed step dt on the closed loop.
Trajectory simulate_closed_loop(const Certificate& cert, const GroundTruth& gt,
                                const Eigen::VectorXd& x0, double t_end, double dt);

/// `count` initial conditions evenly spaced along the boundary of the
/// square [−box, box]² (the two points ±box for n = 1).
std::vector<Eigen::VectorXd> boundary_ring(int n, double box, int count = 10);

/// CSV with header t,x1..xn,u1..um,V.
std::string trajectory_csv(const Trajectory& tr);

enum class Ordering { kPass, kFail, kInconclusive, kNotApplicable };
std::string to_string(Ordering o);

struct MethodRow {
  Method method = Method::kCor1;
  std::string status;
  int decision_variables = 0;
  int iterations = 0;
  double wall_time = 0.0;
  std::optional<double> max_vdot;
  std::optional<bool> audit_passed;
  std::optional<int> trajectories_converged;
  int trajectories = 0;
};

struct ComparisonReport {
  std::vector<MethodRow> rows;
  Ordering cor1_faster_than_thm2 = Ordering::kNotApplicable;
  std::string table() const;
};

/// Times within `band` (relative) of each other are inconclusive.
Ordering compare_times(double faster, double slower, double band = 0.05);
ComparisonReport make_report(const std::vector<MethodRow>& rows);

}  // namespace polystab
