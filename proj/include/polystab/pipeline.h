#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polystab/experiment.h"
#include "polystab/sdp_solver.h"
#include "polystab/synthesis.h"
#include "polystab/verify.h"

namespace polystab {

struct VerifyOptions {
  AuditOptions audit;
  double t_end = 20.0;
  double dt = 0.01;
  /// ‖x(t_end)‖ below this counts as converged.
  double converge_tol = 1e-3;
  /// Initial conditions; the boundary ring of the audit box when empty.
  std::vector<Eigen::VectorXd> x0;
};

struct Verification {
  AuditReport audit;
  std::vector<Eigen::VectorXd> x0;
  std::vector<Trajectory> trajectories;
  int converged = 0;
  bool passed() const;
};

Verification verify_certificate(const Certificate& cert, const GroundTruth& gt,
                                const VerifyOptions& opts);

/// One method run end to end. `status` is the solver status, or
/// "structurally_infeasible" / "ill_conditioned" / "config_error" when the
/// run stopped before or after the solve.
struct MethodOutcome {
  Method method = Method::kCor1;
  std::string status;
  std::string message;
  int decision_variables = 0;
  SolveReport report;
  double wall_time = 0.0;
  std::optional<Certificate> certificate;
  std::optional<Verification> verification;
  std::vector<std::string> warnings;

  /// A certificate exists, has no violations, and passed verification when
  /// one was run.
  bool success() const;
  MethodRow row() const;
};

/// Builds, compiles, solves and extracts; verifies when gt is given. Wall
/// time covers formulation, solve and extraction.
MethodOutcome run_method(const SynthesisProblem& problem, const SolveOptions& solve_opts,
                         const GroundTruth* gt = nullptr, const VerifyOptions& verify_opts = {});

}  // namespace polystab
