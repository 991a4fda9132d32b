#include "polystab/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "polystab/errors.h"
#include "polystab/integrate.h"
#include "polystab/log.h"
#include "polystab/matrix_io.h"

namespace polystab {

namespace {

constexpr double kMaxCondition = 1e12;

Eigen::MatrixXd symmetric_inverse(const Eigen::MatrixXd& P, double& condition) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (P + P.transpose()));
  const Eigen::VectorXd& l = es.eigenvalues();
  if (l(0) <= 0.0) {
    condition = std::numeric_limits<double>::infinity();
    throw IllConditionedCertificate("P is not positive definite (lambda_min = " +
                                    std::to_string(l(0)) + "); raise rho");
  }
  condition = l(l.size() - 1) / l(0);
  if (condition > kMaxCondition) {
    throw IllConditionedCertificate("cond(P) = " + std::to_string(condition) +
                                    " exceeds 1e12; raise rho");
  }
  return es.eigenvectors() * l.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (m + m.transpose()),
                                                        Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

PolyMatrix controller_gain(Method method, const PolyMatrix& yk, const Eigen::MatrixXd& U0,
                           const Eigen::MatrixXd& P_inv) {
  if (method == Method::kCor1) return yk * P_inv;
  return (U0 * yk) * P_inv;
}

double radical_inverse(int index, int base) {
  double out = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    out += f * (index % base);
    index /= base;
    f /= base;
  }
  return out;
}

}  // namespace

double Certificate::V(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd z = evaluate(Zhat, x);
  return z.dot(P_inv * z);
}

Eigen::VectorXd Certificate::u(const Eigen::VectorXd& x) const {
  return evaluate(F, x) * evaluate(Zhat, x);
}

Certificate extract(const SynthesisProblem& problem, const SosSynthesis& syn,
                    const SolveReport& report) {
  if (!is_success(report.status)) {
    throw ConfigError("no certificate: solver status " + to_string(report.status));
  }
  const Eigen::VectorXd& v = report.v;
  Certificate c;
  c.method = syn.method;
  c.n = problem.spec.n;
  c.m = problem.spec.m;
  c.rho = problem.opts.rho;
  c.delta = problem.opts.delta;
  c.P = syn.P(v);
  c.P = 0.5 * (c.P + c.P.transpose());
  c.P_inv = symmetric_inverse(c.P, c.P_condition);
  log_info("{}: cond(P) = {:.3e}", to_string(c.method), c.P_condition);
  c.Zhat = problem.spec.Zhat;
  c.YorK = substitute(syn.YorK, v);
  c.eps1 = substitute(syn.eps1, v);
  c.eps2 = substitute(syn.eps2, v);
  c.F = controller_gain(c.method, c.YorK, problem.data.U0, c.P_inv);
  c.condition = substitute(syn.condition, v);
  c.decision_variables = syn.program.num_vars();
  c.solver_status = to_string(report.status);
  c.solver_iterations = report.iterations;

  if (min_eigenvalue(c.P) < c.rho - 1e-8) {
    c.violations.push_back("lambda_min(P) below rho");
  }
  if (syn.equality) {
    c.equality_residual = max_abs_coefficient(substitute(*syn.equality, v));
    if (*c.equality_residual > 1e-6) {
      c.violations.push_back("Z0*Y - H*P residual " + std::to_string(*c.equality_residual));
    }
  }
  for (const auto& blk : syn.program.blocks()) {
    const double l = min_eigenvalue(smat(v.segment(blk.offset, svec_size(blk.size)), blk.size));
    if (l < -1e-9) {
      c.violations.push_back("block '" + blk.name + "' has eigenvalue " + std::to_string(l));
    }
  }
  for (const auto& msg : c.violations) log_error("{}: {}", to_string(c.method), msg);
  return c;
}

nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j;
  j["method"] = to_string(c.method);
  j["n"] = c.n;
  j["m"] = c.m;
  j["rho"] = c.rho;
  j["delta"] = c.delta;
  j["P"] = to_json(c.P);
  j["Zhat"] = to_json(c.Zhat);
  j["F"] = to_json(c.F);
  j["YorK"] = to_json(c.YorK);
  j["eps1"] = to_json(c.eps1);
  j["eps2"] = to_json(c.eps2);
  if (c.equality_residual) j["equality_residual"] = *c.equality_residual;
  j["decision_variables"] = c.decision_variables;
  j["solver"] = {{"status", c.solver_status}, {"iterations", c.solver_iterations}};
  return j;
}

Certificate certificate_from_json(const nlohmann::json& j) {
  try {
    Certificate c;
    c.method = parse_method(j.at("method").get<std::string>());
    c.n = j.at("n").get<int>();
    c.m = j.at("m").get<int>();
    c.rho = j.value("rho", 0.0);
    c.delta = j.value("delta", 0.0);
    c.P = matrix_from_json(j.at("P"));
    c.Zhat = matrix_polynomial_from_json(j.at("Zhat"));
    c.F = matrix_polynomial_from_json(j.at("F"));
    if (j.contains("YorK")) c.YorK = matrix_polynomial_from_json(j.at("YorK"));
    if (j.contains("eps1")) c.eps1 = polynomial_from_json(j.at("eps1"));
    if (j.contains("eps2")) c.eps2 = polynomial_from_json(j.at("eps2"));
    if (j.contains("equality_residual")) {
      c.equality_residual = j.at("equality_residual").get<double>();
    }
    c.decision_variables = j.value("decision_variables", 0);
    if (j.contains("solver")) {
      c.solver_status = j["solver"].value("status", "");
      c.solver_iterations = j["solver"].value("iterations", 0);
    }
    if (c.P.rows() != c.P.cols() || c.P.rows() != c.Zhat.rows() || c.F.cols() != c.Zhat.rows() ||
        c.F.rows() != c.m || c.Zhat.nvars() != c.n) {
      throw FormatError("certificate dimensions are inconsistent");
    }
    c.P_inv = symmetric_inverse(c.P, c.P_condition);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad certificate JSON: ") + e.what());
  }
}

std::string dump_certificate(const Certificate& cert) { return to_json(cert).dump(2) + "\n"; }

std::vector<Eigen::VectorXd> halton_points(int n, int count, double box, int skip) {
  static const int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (n > static_cast<int>(std::size(kPrimes))) throw ShapeError("too many dimensions");
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = box * (2.0 * radical_inverse(k + skip, kPrimes[i]) - 1.0);
    }
    out.push_back(std::move(x));
  }
  return out;
}

PolyMatrix closed_loop_field(const Certificate& cert, const GroundTruth& gt) {
  if (gt.n() != cert.n || gt.m() != cert.m) {
    throw ShapeError("ground truth dimensions differ from the certificate");
  }
  return gt.f + gt.g * (cert.F * cert.Zhat);
}

Polynomial<double> lyapunov_derivative(const Certificate& cert, const GroundTruth& gt) {
  const PolyMatrix field = closed_loop_field(cert, gt);
  const PolyMatrix vdot = (cert.Zhat.transpose() * cert.P_inv) * jacobian(cert.Zhat) * field;
  return vdot(0, 0) * 2.0;
}

double condition_min_eigenvalue(const Certificate& cert,
                                const std::vector<Eigen::VectorXd>& points) {
  if (cert.condition.rows() == 0) return std::numeric_limits<double>::quiet_NaN();
  double out = std::numeric_limits<double>::infinity();
  for (const auto& x : points) out = std::min(out, min_eigenvalue(evaluate(cert.condition, x)));
  return out;
}

AuditReport lyapunov_audit(const Certificate& cert, const GroundTruth& gt,
                           const AuditOptions& opts) {
  const Polynomial<double> vdot = lyapunov_derivative(cert, gt);
  AuditReport r;
  r.max_vdot = -std::numeric_limits<double>::infinity();
  r.max_normalized_vdot = -std::numeric_limits<double>::infinity();
  r.min_v_normalized = std::numeric_limits<double>::infinity();
  // A few spare points replace the ones where Zhat vanishes (the origin).
  for (const auto& x : halton_points(cert.n, opts.samples + 16, opts.box)) {
    if (r.samples == opts.samples) break;
    const Eigen::VectorXd z = evaluate(cert.Zhat, x);
    const double zn2 = z.squaredNorm();
    if (zn2 == 0.0) continue;
    ++r.samples;
    const double vd = evaluate(vdot, x);
    if (vd <= -opts.margin * zn2) ++r.negative;
    r.max_vdot = std::max(r.max_vdot, vd);
    if (vd / zn2 > r.max_normalized_vdot) {
      r.max_normalized_vdot = vd / zn2;
      r.worst_point = x;
    }
    r.min_v_normalized = std::min(r.min_v_normalized, z.dot(cert.P_inv * z) / zn2);
  }
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> dist(-opts.box, opts.box);
  std::vector<Eigen::VectorXd> pts(opts.condition_samples, Eigen::VectorXd(cert.n));
  for (auto& x : pts) {
    for (int i = 0; i < cert.n; ++i) x(i) = dist(rng);
  }
  r.condition_min_eig = condition_min_eigenvalue(cert, pts);
  r.passed = r.samples > 0 && r.negative == r.samples && r.min_v_normalized > 0.0;
  log_info("audit {}: {}/{} samples with Vdot < 0, max Vdot/|Zhat|^2 = {:.3e}",
           to_string(cert.method), r.negative, r.samples, r.max_normalized_vdot);
  return r;
}

double Trajectory::max_v_increase() const {
  double out = -std::numeric_limits<double>::infinity();
  for (size_t k = 1; k < V.size(); ++k) out = std::max(out, V[k] - V[k - 1]);
  return out;
}

Trajectory simulate_closed_loop(const Certificate& cert, const GroundTruth& gt,
                                const Eigen::VectorXd& x0, double t_end, double dt) {
  if (x0.size() != cert.n) throw ShapeError("initial state has wrong length");
  if (dt <= 0.0 || t_end < 0.0) throw ConfigError("need dt > 0 and t_end >= 0");
  const PolyMatrix field = closed_loop_field(cert, gt);
  auto rhs = [&](double, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return evaluate(field, x).col(0);
  };
  Trajectory tr;
  auto record = [&](double t, const Eigen::VectorXd& x) {
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.u.push_back(cert.u(x));
    tr.V.push_back(cert.V(x));
  };
  const int steps = static_cast<int>(std::llround(t_end / dt));
  Eigen::VectorXd x = x0;
  record(0.0, x);
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    x = rk4_step(rhs, t, x, dt);
    if (!x.allFinite() || x.norm() > kDivergenceNorm) {
      tr.diverged = true;
      tr.escape_time = t + dt;
      break;
    }
    record((k + 1) * dt, x);
  }
  return tr;
}

std::vector<Eigen::VectorXd> boundary_ring(int n, double box, int count) {
  std::vector<Eigen::VectorXd> out;
  if (n == 1) {
    Eigen::VectorXd lo(1), hi(1);
    lo << -box;
    hi << box;
    return {lo, hi};
  }
  if (n == 2) {
    const double perimeter = 8.0 * box;
    for (int k = 0; k < count; ++k) {
      double s = perimeter * k / count;
      Eigen::VectorXd x(2);
      const double side = 2.0 * box;
      if (s < side) {
        x << -box + s, -box;
      } else if ((s -= side) < side) {
        x << box, -box + s;
      } else if ((s -= side) < side) {
        x << box - s, box;
      } else {
        s -= side;
        x << -box, box - s;
      }
      out.push_back(x);
    }
    return out;
  }
  for (auto x : halton_points(n, count, box)) {
    x *= box / x.cwiseAbs().maxCoeff();
    out.push_back(x);
  }
  return out;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::ostringstream os;
  const int n = tr.x.empty() ? 0 : static_cast<int>(tr.x[0].size());
  const int m = tr.u.empty() ? 0 : static_cast<int>(tr.u[0].size());
  os << "t";
  for (int i = 0; i < n; ++i) os << ",x" << i + 1;
  for (int i = 0; i < m; ++i) os << ",u" << i + 1;
  os << ",V\n";
  for (size_t k = 0; k < tr.t.size(); ++k) {
    os << format_double(tr.t[k]);
    for (int i = 0; i < n; ++i) os << "," << format_double(tr.x[k](i));
    for (int i = 0; i < m; ++i) os << "," << format_double(tr.u[k](i));
    os << "," << format_double(tr.V[k]) << "\n";
  }
  return os.str();
}

std::string to_string(Ordering o) {
  switch (o) {
    case Ordering::kPass: return "pass";
    case Ordering::kFail: return "fail";
    case Ordering::kInconclusive: return "inconclusive";
    case Ordering::kNotApplicable: return "n/a";
  }
  return "unknown";
}

Ordering compare_times(double faster, double slower, double band) {
  if (std::abs(faster - slower) <= band * std::max(faster, slower)) return Ordering::kInconclusive;
  return faster < slower ? Ordering::kPass : Ordering::kFail;
}

ComparisonReport make_report(const std::vector<MethodRow>& rows) {
  ComparisonReport r;
  r.rows = rows;
  const MethodRow* cor1 = nullptr;
  const MethodRow* thm2 = nullptr;
  for (const auto& row : r.rows) {
    if (row.method == Method::kCor1) cor1 = &row;
    if (row.method == Method::kThm2) thm2 = &row;
  }
  if (cor1 && thm2) r.cor1_faster_than_thm2 = compare_times(cor1->wall_time, thm2->wall_time);
  return r;
}

std::string ComparisonReport::table() const {
  std::string out = fmt::format("{:<8} {:<18} {:>9} {:>6} {:>10} {:>12} {:>7} {:>10}\n", "method",
                                "status", "variables", "iters", "time[s]", "max Vdot", "audit",
                                "converged");
  for (const auto& row : rows) {
    const std::string vdot = row.max_vdot ? fmt::format("{:.3e}", *row.max_vdot) : "-";
    const std::string audit = row.audit_passed ? (*row.audit_passed ? "pass" : "FAIL") : "-";
    const std::string conv =
        row.trajectories_converged
            ? fmt::format("{}/{}", *row.trajectories_converged, row.trajectories)
            : "-";
    out += fmt::format("{:<8} {:<18} {:>9} {:>6} {:>10.3f} {:>12} {:>7} {:>10}\n",
                       to_string(row.method), row.status, row.decision_variables, row.iterations,
                       row.wall_time, vdot, audit, conv);
  }
  if (cor1_faster_than_thm2 != Ordering::kNotApplicable) {
    out += "cor1 faster than thm2: " + to_string(cor1_faster_than_thm2) + "\n";
  }
  return out;
}

}  // namespace polystab
