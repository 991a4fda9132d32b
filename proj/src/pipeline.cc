#include "polystab/pipeline.h"

#include <chrono>

#include "polystab/errors.h"
#include "polystab/log.h"

namespace polystab {

bool Verification::passed() const {
  return audit.passed && converged == static_cast<int>(trajectories.size());
}

Verification verify_certificate(const Certificate& cert, const GroundTruth& gt,
                                const VerifyOptions& opts) {
  Verification v;
  v.audit = lyapunov_audit(cert, gt, opts.audit);
  v.x0 = opts.x0.empty() ? boundary_ring(cert.n, opts.audit.box) : opts.x0;
  for (const auto& x0 : v.x0) {
    Trajectory tr = simulate_closed_loop(cert, gt, x0, opts.t_end, opts.dt);
    if (!tr.diverged && tr.final_norm() < opts.converge_tol) ++v.converged;
    v.trajectories.push_back(std::move(tr));
  }
  return v;
}

bool MethodOutcome::success() const {
  if (!certificate || !certificate->violations.empty()) return false;
  return !verification || verification->passed();
}

MethodRow MethodOutcome::row() const {
  MethodRow r;
  r.method = method;
  r.status = status;
  r.decision_variables = decision_variables;
  r.iterations = report.iterations;
  r.wall_time = wall_time;
  if (verification) {
    r.max_vdot = verification->audit.max_vdot;
    r.audit_passed = verification->audit.passed;
    r.trajectories_converged = verification->converged;
    r.trajectories = static_cast<int>(verification->trajectories.size());
  }
  return r;
}

MethodOutcome run_method(const SynthesisProblem& problem, const SolveOptions& solve_opts,
                         const GroundTruth* gt, const VerifyOptions& verify_opts) {
  MethodOutcome out;
  out.method = problem.method;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  try {
    const SosSynthesis syn = build(problem);
    out.warnings = syn.warnings;
    out.decision_variables = syn.program.num_vars();
    const SDPInstance inst = syn.program.compile();
    out.report = solve(inst, solve_opts);
    out.status = to_string(out.report.status);
    out.message = out.report.message;
    if (is_success(out.report.status)) out.certificate = extract(problem, syn, out.report);
  } catch (const StructuralInfeasibility& e) {
    out.status = "structurally_infeasible";
    out.message = e.what();
  } catch (const IllConditionedCertificate& e) {
    out.status = "ill_conditioned";
    out.message = e.what();
  }
  out.wall_time = elapsed();
  log_info("{}: {} in {:.3f}s", to_string(out.method), out.status, out.wall_time);
  if (out.certificate && gt) out.verification = verify_certificate(*out.certificate, *gt, verify_opts);
  return out;
}

}  // namespace polystab
