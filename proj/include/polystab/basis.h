#pragma once

#include <string>
#include <vector>

#include "polystab/polynomial.h"

namespace polystab {

using PolyMatrix = MatrixPolynomial<double>;

/// Column vector of every monomial in n variables with degree in
/// [dmin, dmax], graded-lex ordered.
PolyMatrix build_power_vector(int n, int dmin, int dmax);

/// Column vector from an explicit monomial list.
PolyMatrix monomial_vector(const std::vector<Monomial>& monomials);

/// H(x) with Z(x) = H(x)·Ẑ(x).
///
/// Row i carries a single monomial Zᵢ/Ẑⱼ in the column j of the
/// highest-degree entry of Ẑ dividing Zᵢ (lowest index on ties). Throws
/// FactorizationError when no entry of Ẑ divides Zᵢ.
PolyMatrix factorize(const PolyMatrix& z, const PolyMatrix& zhat);

/// Power vectors and input monomials of the linear-like form
/// ẋ = A·Z(x) + B·W(x)·u.
struct BasisSpec {
  int n = 0;
  int m = 0;
  PolyMatrix Z;     // N×1
  PolyMatrix Zhat;  // p×1
  PolyMatrix H;     // N×p
  PolyMatrix W;     // q×m

  int N() const { return Z.rows(); }
  int p() const { return Zhat.rows(); }
  int q() const { return W.rows(); }

  /// W(x) is the constant identity, so the input vector field is
  /// state-independent.
  bool input_field_constant() const;

  /// Z = degrees [zmin, zmax], Ẑ = degrees [1, zhat_max] (so Ẑ starts with
  /// x), W = I_m unless given.
  static BasisSpec from_degrees(int n, int m, int zmin, int zmax,
                                int zhat_max = 1);
  static BasisSpec from_degrees(int n, int zmin, int zmax, int zhat_max,
                                const PolyMatrix& w);
};

struct BasisCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct BasisDiagnostics {
  std::vector<BasisCheck> checks;
  bool ok() const;
  const BasisCheck* find(const std::string& name) const;
};

/// Checks the standing assumptions on a basis: Ẑ starts with x, Z(0) = 0,
/// Z entries are distinct monomials, and Z = H·Ẑ coefficientwise.
BasisDiagnostics validate_basis(const BasisSpec& spec);

}  // namespace polystab
