#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include <Eigen/Dense>

#include "polystab/errors.h"
#include "polystab/sos_program.h"

namespace polystab {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSymmetryTolerance = 1e-9;
constexpr double kConsistencyTolerance = 1e-8;

double max_abs(const AffineExpr& e) {
  double out = std::abs(e.constant());
  for (const auto& [index, c] : e.terms()) out = std::max(out, std::abs(c));
  return out;
}

double max_abs(const AffinePoly& p) {
  double out = 0.0;
  for (const auto& [m, c] : p.terms()) out = std::max(out, max_abs(c));
  return out;
}

bool has_term(const AffinePoly& p, const Monomial& m) {
  return p.terms().count(m) > 0;
}

}  // namespace

std::vector<Monomial> half_degree_basis(const AffineMatrix& m) {
  const int n = m.nvars();
  std::vector<bool> occurs(n, false);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      for (const auto& [mono, c] : m(i, j).terms()) {
        for (int k = 0; k < n; ++k) occurs[k] = occurs[k] || mono[k] > 0;
      }
    }
  }
  std::vector<int> vars;
  for (int k = 0; k < n; ++k) {
    if (occurs[k]) vars.push_back(k);
  }
  const int half = (m.degree() + 1) / 2;
  std::vector<Monomial> out;
  if (vars.empty()) return {Monomial(n)};
  for (const auto& small : monomials_of_degree(static_cast<int>(vars.size()), 0, half)) {
    std::vector<int> e(n, 0);
    for (size_t k = 0; k < vars.size(); ++k) e[vars[k]] = small[static_cast<int>(k)];
    out.emplace_back(std::move(e));
  }
  return out;
}

int SosProgram::new_free(const std::string& name, int count) {
  if (count < 0) throw ShapeError("negative variable count");
  const int offset = num_vars_;
  layout_.push_back({name, offset, count});
  num_vars_ += count;
  return offset;
}

int SosProgram::new_psd(const std::string& name, int size) {
  if (size < 1) throw ShapeError("PSD block '" + name + "' must have size >= 1");
  const int offset = new_free(name, svec_size(size));
  blocks_.push_back({name, size, offset});
  return static_cast<int>(blocks_.size()) - 1;
}

AffineExpr SosProgram::psd_entry(int k, int i, int j) const {
  const auto& blk = blocks_.at(k);
  if (i < 0 || j < 0 || i >= blk.size || j >= blk.size) {
    throw ShapeError("PSD entry out of range in block '" + blk.name + "'");
  }
  return AffineExpr::variable(blk.offset + svec_index(blk.size, i, j),
                              i == j ? 1.0 : 1.0 / kSqrt2);
}

AffineMatrix SosProgram::psd_matrix(int k) const {
  const int s = blocks_.at(k).size;
  AffineMatrix out(s, s, nvars_);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      out(i, j) = AffinePoly::constant(nvars_, psd_entry(k, i, j));
    }
  }
  return out;
}

AffinePoly SosProgram::new_polynomial(const std::string& name,
                                      const std::vector<Monomial>& monomials) {
  const int offset = new_free(name, static_cast<int>(monomials.size()));
  AffinePoly out(nvars_);
  for (size_t k = 0; k < monomials.size(); ++k) {
    out.add_term(monomials[k], AffineExpr::variable(offset + static_cast<int>(k)));
  }
  return out;
}

AffinePoly SosProgram::new_sos_polynomial(const std::string& name,
                                          const std::vector<Monomial>& basis) {
  const int k = new_psd(name, static_cast<int>(basis.size()));
  AffinePoly out(nvars_);
  for (size_t i = 0; i < basis.size(); ++i) {
    for (size_t j = 0; j < basis.size(); ++j) {
      out.add_term(basis[i] * basis[j],
                   psd_entry(k, static_cast<int>(i), static_cast<int>(j)));
    }
  }
  return out;
}

void SosProgram::add_row(const AffineExpr& e) {
  const int row = static_cast<int>(rhs_.size());
  for (const auto& [index, c] : e.terms()) triplets_.emplace_back(row, index, c);
  rhs_.push_back(-e.constant());
}

void SosProgram::add_equality(const std::string& name, const AffineExpr& e) {
  row_ranges_.push_back({name, static_cast<int>(rhs_.size()), 1});
  add_row(e);
}

void SosProgram::add_polynomial_identity(const std::string& name,
                                         const AffineMatrix& m) {
  if (m.nvars() != nvars_) throw ShapeError("identity over wrong variable count");
  const int first = static_cast<int>(rhs_.size());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      for (const auto& [mono, c] : m(i, j).terms()) add_row(c);
    }
  }
  row_ranges_.push_back({name, first, static_cast<int>(rhs_.size()) - first});
}

int SosProgram::add_sos_matrix(const std::string& name, const AffineMatrix& m) {
  if (m.rows() != m.cols()) {
    throw ShapeError("SOS matrix '" + name + "' is " + m.shape_string());
  }
  if (m.nvars() != nvars_) throw ShapeError("SOS matrix over wrong variable count");
  const int r = m.rows();

  double scale = 0.0;
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) scale = std::max(scale, max_abs(m(a, b)));
  }
  AffineMatrix sym(r, r, nvars_);
  for (int a = 0; a < r; ++a) {
    sym(a, a) = m(a, a);
    for (int b = a + 1; b < r; ++b) {
      if (max_abs(m(a, b) - m(b, a)) > kSymmetryTolerance * (1.0 + scale)) {
        throw ShapeError("SOS matrix '" + name + "' is not symmetric at (" +
                         std::to_string(a) + "," + std::to_string(b) + ")");
      }
      AffinePoly avg = (m(a, b) + m(b, a)) * 0.5;
      sym(a, b) = avg;
      sym(b, a) = avg;
    }
  }

  GramConstraint g;
  g.name = name;
  g.r = r;
  g.basis = half_degree_basis(sym);
  g.matrix = sym;
  const int L = static_cast<int>(g.basis.size());

  // A Gram row (k, a) whose diagonal monomial z_k² cannot appear in entry
  // (a, a) by any other route is forced to zero; drop it until stable.
  std::vector<std::vector<bool>> alive(L, std::vector<bool>(r, true));
  for (bool changed = true; changed;) {
    changed = false;
    for (int a = 0; a < r; ++a) {
      for (int k = 0; k < L; ++k) {
        if (!alive[k][a]) continue;
        const Monomial sq = g.basis[k] * g.basis[k];
        if (has_term(sym(a, a), sq)) continue;
        bool other_route = false;
        for (int k1 = 0; k1 < L && !other_route; ++k1) {
          if (k1 == k || !alive[k1][a] || !g.basis[k1].divides(sq)) continue;
          const Monomial rest = sq / g.basis[k1];
          for (int k2 = 0; k2 < L; ++k2) {
            if (k2 != k && alive[k2][a] && g.basis[k2] == rest) {
              other_route = true;
              break;
            }
          }
        }
        if (!other_route) {
          alive[k][a] = false;
          changed = true;
        }
      }
    }
  }
  for (int k = 0; k < L; ++k) {
    for (int a = 0; a < r; ++a) {
      if (alive[k][a]) g.kept.emplace_back(k, a);
    }
  }

  using Key = std::tuple<int, int, Monomial>;
  std::map<Key, AffineExpr> equations;
  const int size = static_cast<int>(g.kept.size());
  if (size > 0) {
    g.block = new_psd("gram:" + name, size);
    const SdpBlock& blk = blocks_[g.block];
    for (int p = 0; p < size; ++p) {
      for (int q = p; q < size; ++q) {
        auto [k1, a1] = g.kept[p];
        auto [k2, a2] = g.kept[q];
        const double mult = (a1 == a2 && p != q) ? 2.0 : 1.0;
        const double coef = mult * (p == q ? 1.0 : 1.0 / kSqrt2);
        const Key key{std::min(a1, a2), std::max(a1, a2), g.basis[k1] * g.basis[k2]};
        equations[key] += AffineExpr::variable(blk.offset + svec_index(size, q, p), coef);
      }
    }
  }
  for (int a = 0; a < r; ++a) {
    for (int b = a; b < r; ++b) {
      for (const auto& [mono, c] : sym(a, b).terms()) equations[{a, b, mono}] -= c;
    }
  }

  const int first = static_cast<int>(rhs_.size());
  for (const auto& [key, e] : equations) {
    if (!e.is_zero()) add_row(e);
  }
  row_ranges_.push_back({"gram:" + name, first, static_cast<int>(rhs_.size()) - first});
  grams_.push_back(std::move(g));
  return static_cast<int>(grams_.size()) - 1;
}

void SosProgram::minimize_trace(int k) {
  const int s = blocks_.at(k).size;
  AffineExpr tr;
  for (int i = 0; i < s; ++i) tr += psd_entry(k, i, i);
  objective_ = tr;
}

SDPInstance SosProgram::compile() const {
  SDPInstance inst;
  inst.num_vars = num_vars_;
  inst.blocks = blocks_;
  inst.layout = layout_;
  inst.rows = row_ranges_;
  const int m = static_cast<int>(rhs_.size());
  inst.A.resize(m, num_vars_);
  inst.A.setFromTriplets(triplets_.begin(), triplets_.end());
  inst.b = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), m);
  inst.c = Eigen::VectorXd::Zero(num_vars_);
  for (const auto& [index, c] : objective_.terms()) inst.c(index) = c;
  inst.validate();

  if (m > 0) {
    const Eigen::MatrixXd dense(inst.A);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(num_vars_);
    if (num_vars_ > 0) x = dense.colPivHouseholderQr().solve(inst.b);
    const Eigen::VectorXd res = dense * x - inst.b;
    const double tol =
        kConsistencyTolerance * (1.0 + inst.b.norm() + dense.norm() * x.norm());
    Eigen::Index worst = 0;
    if (res.cwiseAbs().maxCoeff(&worst) > tol) {
      std::string where = "row " + std::to_string(worst);
      for (const auto& rr : row_ranges_) {
        if (worst >= rr.first && worst < rr.first + rr.count) {
          where += " (" + rr.name + ")";
        }
      }
      throw StructuralInfeasibility(
          "equality constraints are inconsistent, residual " +
          std::to_string(res.norm()) + " largest at " + where);
    }
  }
  return inst;
}

}  // namespace polystab
