#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "polystab/sdp.h"

namespace polystab {

enum class SolveStatus {
  kOptimal,
  kFeasible,
  kInfeasible,
  kNumericalFailure,
  kIterationLimit,
};

std::string to_string(SolveStatus s);
inline bool is_success(SolveStatus s) {
  return s == SolveStatus::kOptimal || s == SolveStatus::kFeasible;
}

struct SolveOptions {
  double tol_feas = 1e-8;
  /// An improving ray y is accepted when ‖(A_fᵀy, A_gᵀy + Z)‖ ≤ tol_infeas·bᵀy
  /// and τ < κ.
  double tol_infeas = 1e-6;
  /// When the iteration breaks down, the best iterate is still reported as a
  /// solution if its residuals and gap are below this.
  double tol_reduced = 1e-6;
  int max_iter = 500;
  /// Unused by the interior-point method, which is deterministic; kept so
  /// the contract matches randomized backends.
  std::uint64_t seed = 0;
};

struct IterationRecord {
  int iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double mu = 0.0;
  double tau = 0.0;
  double kappa = 0.0;
  double step = 0.0;
};

struct SolveReport {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Eigen::VectorXd v;  // primal decision vector (meaningful on success)
  Eigen::VectorXd y;  // equality multipliers
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double wall_time = 0.0;
  std::string message;
  /// Last few iterations, for diagnosing failures.
  std::vector<IterationRecord> trace_tail;
};

/// Primal-dual interior-point method on the homogeneous self-dual
/// embedding, with Nesterov-Todd scaling and a Mehrotra corrector.
/// Infeasibility is detected from the embedding's improving ray.
SolveReport solve(const SDPInstance& inst, const SolveOptions& opts = {});

struct SolutionCheck {
  std::vector<double> block_min_eigenvalue;
  Eigen::VectorXd row_residual;  // A v − b
  double min_eigenvalue = 0.0;
  double max_residual = 0.0;
  int worst_block = -1;
  int worst_row = -1;

  bool passes(double eig_tol, double residual_tol) const {
    return min_eigenvalue >= -eig_tol && max_residual <= residual_tol;
  }
  /// Human-readable list of violations at the given tolerances.
  std::vector<std::string> violations(const SDPInstance& inst, double eig_tol,
                                      double residual_tol) const;
};

/// Recomputes every block eigenvalue and equality residual from scratch.
SolutionCheck check_solution(const SDPInstance& inst,
                             const Eigen::Ref<const Eigen::VectorXd>& v);

}  // namespace polystab
