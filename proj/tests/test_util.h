#pragma once

#include <random>

#include <Eigen/Core>

#include "polystab/experiment.h"
#include "polystab/sdp_solver.h"
#include "polystab/sos_program.h"
#include "polystab/systems.h"

namespace polystab::testing {

/// The Van der Pol experiment: x0 = [-0.1, 0.1], u = sin t, tau = 0.5,
/// T = 12, D0 = 0.05 X1 and RD = gamma X1.
inline DataSet vanderpol_data(double gamma) {
  const GroundTruth gt = builtin_system("vanderpol");
  const BasisSpec spec = default_basis("vanderpol");
  Eigen::VectorXd x0(2);
  x0 << -0.1, 0.1;
  DataSet ds = simulate_experiment(gt, spec, x0, make_input_signal("sin", 1), 0.0, 0.5, 12,
                                   NoiseModel::proportional(0.05));
  return with_snr_bound(std::move(ds), gamma);
}

/// Noiseless scalar experiment with RD = 0.
inline DataSet exact_scalar_data(const std::string& system, double x0 = 0.2, double tau = 0.1,
                                 int T = 8) {
  const GroundTruth gt = builtin_system(system);
  const BasisSpec spec = default_basis(system);
  Eigen::VectorXd x(1);
  x << x0;
  DataSet ds = simulate_experiment(gt, spec, x, make_input_signal("sin", 1), 0.0, tau, T,
                                   NoiseModel{});
  return with_absolute_bound(std::move(ds), Eigen::MatrixXd::Zero(1, T));
}

/// Solves "m is an SOS matrix" on its own.
inline SolveReport solve_sos(const AffineMatrix& m) {
  SosProgram prog(m.nvars());
  prog.add_sos_matrix("m", m);
  return solve(prog.compile());
}

inline Polynomial<double> random_polynomial(std::mt19937_64& rng, int nvars, int degree) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Polynomial<double> p(nvars);
  for (const auto& m : monomials_of_degree(nvars, 0, degree)) p.add_term(m, coef(rng));
  return p;
}

}  // namespace polystab::testing
