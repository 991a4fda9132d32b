#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace polystab {

/// Length of the scaled half-vectorization of an n×n symmetric matrix.
constexpr int svec_size(int n) { return n * (n + 1) / 2; }

/// Position of entry (i, j) of an n×n symmetric matrix in its svec.
/// Column-major lower triangle; off-diagonal entries carry a factor √2 so
/// that ⟨X, Y⟩ = svec(X)ᵀ svec(Y).
inline int svec_index(int n, int i, int j) {
  if (i < j) std::swap(i, j);
  return j * n - j * (j - 1) / 2 + (i - j);
}

Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int n);

/// A PSD constraint smat(v[offset : offset + svec_size(size)]) ⪰ 0.
struct SdpBlock {
  std::string name;
  int size = 0;
  int offset = 0;
};

/// Named contiguous range of the decision vector.
struct VarSlice {
  std::string name;
  int offset = 0;
  int length = 0;
};

/// Named contiguous range of equality rows.
struct RowRange {
  std::string name;
  int first = 0;
  int count = 0;
};

/// A semidefinite program in standard form with free variables:
///
///     minimize  cᵀv   subject to  A v = b,  every block ⪰ 0.
///
/// Entries of v not covered by a block are free.
struct SDPInstance {
  int num_vars = 0;
  std::vector<SdpBlock> blocks;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<VarSlice> layout;
  std::vector<RowRange> rows;

  int num_equalities() const { return static_cast<int>(b.size()); }
  /// Variables not covered by any PSD block.
  std::vector<int> free_indices() const;
  Eigen::MatrixXd block_matrix(int k, const Eigen::Ref<const Eigen::VectorXd>& v) const;
  const VarSlice* find_slice(const std::string& name) const;
  /// Consistency checks on block offsets, layout coverage and shapes.
  void validate() const;
};

/// Writes the instance in sparse SDPA format. The equality rows become the
/// SDPA constraint matrices, each PSD block keeps its size, and free
/// variables are split as v = v⁺ − v⁻ into one trailing diagonal block.
std::string to_sdpa(const SDPInstance& inst);
void write_sdpa(const SDPInstance& inst, const std::string& path);

/// Parses sparse SDPA. Diagonal blocks become 1×1 PSD blocks.
SDPInstance read_sdpa(const std::string& path);
SDPInstance parse_sdpa(const std::string& text);

}  // namespace polystab
