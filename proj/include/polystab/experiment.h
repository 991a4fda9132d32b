#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "polystab/basis.h"

namespace polystab {

/// The true dynamics ẋ = f(x) + g(x)u. Only the simulator and the verifier
/// ever look at it; synthesis sees data alone.
struct GroundTruth {
  PolyMatrix f;  // n×1
  PolyMatrix g;  // n×m

  int n() const { return f.rows(); }
  int m() const { return g.cols(); }

  Eigen::VectorXd rhs(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

  /// Throws ConfigError unless f(0) = 0 and shapes agree.
  void check() const;
};

/// Coefficient extraction of the unknown A, B in ẋ = A·Z(x) + B·W(x)·u.
/// Throws ConfigError if f has monomials outside Z or g is not B·W.
struct LinearLikeForm {
  Eigen::MatrixXd A;  // n×N
  Eigen::MatrixXd B;  // n×q
};
LinearLikeForm linear_like_form(const GroundTruth& gt, const BasisSpec& spec);

using InputSignal = std::function<Eigen::VectorXd(double)>;

/// "sin" (every channel sin t), "zero", or "const:<c>".
InputSignal make_input_signal(const std::string& name, int m);

struct NoiseModel {
  enum class Kind { kNone, kProportional, kUniform };
  Kind kind = Kind::kNone;
  /// γ for kProportional (D₀ = γ·X₁ clean), δ for kUniform (entries in
  /// [−δ, δ]).
  double level = 0.0;
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel proportional(double gamma) {
    return {Kind::kProportional, gamma, 0};
  }
  static NoiseModel uniform(double delta, std::uint64_t seed = 0) {
    return {Kind::kUniform, delta, seed};
  }
  /// Parses "none", "prop:<γ>", "uniform:<δ>".
  static NoiseModel parse(const std::string& text, std::uint64_t seed = 0);
};

/// Samples of one experiment together with everything derived from them.
struct DataSet {
  int T = 0;
  double tau = 0.0;
  double t0 = 0.0;
  Eigen::MatrixXd U0;     // m×T
  Eigen::MatrixXd X0;     // n×T
  Eigen::MatrixXd X1;     // n×T
  Eigen::MatrixXd Z0;     // N×T
  Eigen::MatrixXd Ubar0;  // q×T
  Eigen::MatrixXd Wbar0;  // (q+N)×T
  Eigen::MatrixXd RD;     // n×T_D noise bound factor, D₀D₀ᵀ ⪯ RD·RDᵀ
  std::optional<Eigen::MatrixXd> RB;  // n×q, BBᵀ ⪯ RB·RBᵀ
  /// Injected noise, known only for simulator-generated data.
  std::optional<Eigen::MatrixXd> D0;

  int n() const { return static_cast<int>(X0.rows()); }
  int m() const { return static_cast<int>(U0.rows()); }
};

/// Builds Z₀, Ū₀ and W̄₀ from raw samples. RD starts as an n×T zero matrix.
DataSet assemble_dataset(const BasisSpec& spec, const Eigen::MatrixXd& U0,
                         const Eigen::MatrixXd& X0, const Eigen::MatrixXd& X1,
                         double t0, double tau);

/// Runs ẋ = f(x) + g(x)u with RK4 (internal step tau/100) and records T
/// samples with exact derivatives plus injected noise.
DataSet simulate_experiment(const GroundTruth& gt, const BasisSpec& spec,
                            const Eigen::VectorXd& x0, const InputSignal& input,
                            double t0, double tau, int T,
                            const NoiseModel& noise);

/// Reads a CSV with header `t,u1..um,x1..xn[,dx1..dxn]`. Without derivative
/// columns X₁ is estimated by central differences (one-sided at the ends).
DataSet ingest(const std::string& path, const BasisSpec& spec);

/// Writes the CSV (always with derivative columns) and a JSON sidecar
/// `<path>.bounds.json` holding RD/RB. Returns the sidecar path.
std::string export_dataset(const DataSet& ds, const std::string& path);

/// Loads RD/RB from a sidecar written by export_dataset.
void load_bounds(DataSet& ds, const std::string& sidecar_path);

/// Sets RD = γ·X₁.
DataSet with_snr_bound(DataSet ds, double gamma);
/// Sets RD to an explicit n×T_D factor.
DataSet with_absolute_bound(DataSet ds, const Eigen::MatrixXd& rd);
/// Sets RB.
DataSet with_input_bound(DataSet ds, const Eigen::MatrixXd& rb);

/// λ_max(D₀D₀ᵀ − RD·RDᵀ); the noise bound holds when ≤ tol.
double noise_bound_violation(const Eigen::MatrixXd& d0, const Eigen::MatrixXd& rd);

struct RichnessReport {
  int rank_z0 = 0;
  int rank_h = 0;
  int T = 0;
  int N = 0;
  bool warning = false;
  std::string message;
};

/// Numerical rank of Z₀ (cutoff 1e−8·σ_max) against the generic rank of
/// H(x); warns when Z₀ cannot be rich enough for Z₀Y(x) = H(x)P.
RichnessReport validate_richness(const DataSet& ds, const BasisSpec& spec);

/// Numerical rank with relative singular-value cutoff.
int numerical_rank(const Eigen::MatrixXd& m, double relative_cutoff);

}  // namespace polystab
