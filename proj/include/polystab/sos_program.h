#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "polystab/polynomial.h"
#include "polystab/sdp.h"

namespace polystab {

using AffinePoly = Polynomial<AffineExpr>;
using AffineMatrix = MatrixPolynomial<AffineExpr>;

/// Monomials of degree 0..⌈deg(m)/2⌉ in the variables that occur in m.
std::vector<Monomial> half_degree_basis(const AffineMatrix& m);

/// One Σʳ constraint after Gram reduction.
struct GramConstraint {
  std::string name;
  int block = -1;  // PSD block of the Gram matrix, -1 if fully pruned
  int r = 0;
  std::vector<Monomial> basis;
  /// Kept Gram rows as (basis index k, matrix row a); dropped rows had a
  /// forced zero diagonal.
  std::vector<std::pair<int, int>> kept;
  /// The symmetrized matrix that was reduced.
  AffineMatrix matrix;
};

/// An SOS program: decision variables, linear equalities and SOS-matrix
/// constraints, all affine in one decision vector v.
///
/// Variables are created in call order, so compile() is deterministic.
class SosProgram {
 public:
  explicit SosProgram(int nvars) : nvars_(nvars) {}

  int nvars() const { return nvars_; }
  int num_vars() const { return num_vars_; }

  /// Reserves `count` free scalars; returns the offset of the first.
  int new_free(const std::string& name, int count);
  /// Reserves a size×size PSD matrix; returns its block index.
  int new_psd(const std::string& name, int size);

  AffineExpr free_var(int offset) const { return AffineExpr::variable(offset); }
  /// Entry (i, j) of PSD block k as an affine expression in v.
  AffineExpr psd_entry(int k, int i, int j) const;
  /// The whole PSD block as a constant matrix polynomial.
  AffineMatrix psd_matrix(int k) const;

  /// Polynomial with one free coefficient per monomial.
  AffinePoly new_polynomial(const std::string& name,
                            const std::vector<Monomial>& monomials);
  /// zᵀQz with a fresh PSD Gram matrix Q over basis z.
  AffinePoly new_sos_polynomial(const std::string& name,
                                const std::vector<Monomial>& basis);

  /// e = 0.
  void add_equality(const std::string& name, const AffineExpr& e);
  /// Every coefficient of every entry of m vanishes.
  void add_polynomial_identity(const std::string& name, const AffineMatrix& m);
  /// m ∈ Σʳ via a Gram matrix. Returns the index into gram_constraints().
  /// Throws ShapeError if m is not square or not symmetric.
  int add_sos_matrix(const std::string& name, const AffineMatrix& m);

  void minimize(const AffineExpr& objective) { objective_ = objective; }
  /// Objective trace(block k).
  void minimize_trace(int k);

  const std::vector<GramConstraint>& gram_constraints() const { return grams_; }
  const std::vector<SdpBlock>& blocks() const { return blocks_; }

  /// Standard form. Throws StructuralInfeasibility when A v = b has no
  /// solution at all.
  SDPInstance compile() const;

 private:
  void add_row(const AffineExpr& e);

  int nvars_ = 0;
  int num_vars_ = 0;
  std::vector<SdpBlock> blocks_;
  std::vector<VarSlice> layout_;
  std::vector<RowRange> row_ranges_;
  std::vector<Eigen::Triplet<double>> triplets_;
  std::vector<double> rhs_;
  AffineExpr objective_;
  std::vector<GramConstraint> grams_;
};

}  // namespace polystab
