#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polystab/basis.h"
#include "polystab/experiment.h"
#include "polystab/sos_program.h"

namespace polystab {

/// The five data-driven formulations.
///   kThm1    : noise and input-matrix bounds, Û₀-based block of size p+q+T.
///   kRemark1 : W(x) = I, block of size p+T, noise bound only.
///   kThm2    : S = [B A] parametrization, block of size p+q+N.
///   kCor1    : as kThm2 with K(x) = U₀Y(x), no equality constraint.
///   kLsq     : kThm1-shaped block around the least-squares model S*.
enum class Method { kThm1, kRemark1, kThm2, kCor1, kLsq };

std::string to_string(Method m);
/// Accepts thm1, remark1, thm2, cor1, lsq. Throws ConfigError otherwise.
Method parse_method(const std::string& name);
/// Whether the controller is built from Y(x) with Z₀Y(x) = H(x)P.
bool has_equality_constraint(Method m);

struct SynthesisOptions {
  int deg_y = 2;     // degree of Y(x) or K(x)
  int deg_eps1 = 2;  // even, ≥ 2
  /// Even, ≥ 0; 0 makes ε₂ a nonnegative constant. Defaults to 2 because a
  /// constant ε₂ cannot balance degree-2 off-diagonal blocks.
  int deg_eps2 = 2;
  double delta = 1e-6;  // ε₁(x) − δ‖x‖² ∈ Σ
  double rho = 1e-3;    // P ⪰ ρI
  bool trace_objective = false;
};

struct SynthesisProblem {
  Method method = Method::kCor1;
  BasisSpec spec;
  DataSet data;
  SynthesisOptions opts;
};

struct VariableCounts {
  int P = 0;
  int YorK = 0;
  int eps1 = 0;
  int eps2 = 0;
  int gram = 0;
  int total = 0;
};

/// A built SOS program together with handles to the pieces needed to read
/// a certificate back out of a solution vector.
struct SosSynthesis {
  Method method = Method::kCor1;
  SosProgram program{0};
  int p_block = -1;    // PSD block holding P − ρI
  double rho = 0.0;
  int p = 0;
  AffineMatrix YorK;   // T×p (Y) or m×p (K)
  AffinePoly eps1;
  AffinePoly eps2;
  AffineMatrix condition;  // the block matrix required to be SOS
  int condition_gram = -1;
  /// Z₀Y(x) − H(x)P when the method has the equality constraint.
  std::optional<AffineMatrix> equality;
  std::vector<std::string> warnings;

  VariableCounts counts() const;
  /// P = ρI + (PSD block) at decision vector v.
  Eigen::MatrixXd P(const Eigen::Ref<const Eigen::VectorXd>& v) const;
};

/// Degree, sign and shape checks shared by all builders; throws ConfigError
/// or ShapeError.
void check_options(const SynthesisProblem& problem);

SosSynthesis build_thm1(const SynthesisProblem& problem);
SosSynthesis build_remark1(const SynthesisProblem& problem);
SosSynthesis build_thm2(const SynthesisProblem& problem);
SosSynthesis build_cor1(const SynthesisProblem& problem);
SosSynthesis build_lsq(const SynthesisProblem& problem);
/// Dispatches on problem.method.
SosSynthesis build(const SynthesisProblem& problem);

/// Moore–Penrose inverse with singular values below cutoff·σ_max dropped.
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double cutoff = 1e-10);

/// S* = X₁·W̄₀†, the least-squares estimate of [B A].
Eigen::MatrixXd least_squares_model(const DataSet& ds);

}  // namespace polystab
