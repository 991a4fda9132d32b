#pragma once

#include <cmath>
#include <map>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "polystab/affine.h"
#include "polystab/errors.h"
#include "polystab/monomial.h"

namespace polystab {

template <typename Scalar>
struct CoefficientTraits;

template <>
struct CoefficientTraits<double> {
  static bool negligible(double c) { return std::abs(c) < kDropTolerance; }
};

template <>
struct CoefficientTraits<AffineExpr> {
  static bool negligible(const AffineExpr& c) { return c.is_zero(); }
};

/// Sparse multivariate polynomial with coefficients in `Scalar`.
///
/// `Polynomial<double>` is the numeric type. `Polynomial<AffineExpr>` carries
/// coefficients that are affine in SOS decision variables; mixing the two in
/// a product yields the affine kind. Terms are kept canonical: no stored
/// coefficient is negligible, so equality is equality of term maps.
template <typename Scalar>
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Scalar>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}

  static Polynomial constant(int nvars, const Scalar& c) {
    Polynomial p(nvars);
    p.add_term(Monomial(nvars), c);
    return p;
  }
  static Polynomial from_monomial(const Monomial& m, const Scalar& c = 1.0) {
    Polynomial p(m.nvars());
    p.add_term(m, c);
    return p;
  }
  static Polynomial variable(int nvars, int index) {
    return from_monomial(Monomial::variable(nvars, index));
  }

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
  }

  Scalar coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar(0.0) : it->second;
  }

  void add_term(const Monomial& m, const Scalar& c) {
    if (m.nvars() != nvars_) {
      throw ShapeError("term has " + std::to_string(m.nvars()) +
                       " variables, polynomial has " + std::to_string(nvars_));
    }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) it->second += c;
    if (CoefficientTraits<Scalar>::negligible(it->second)) terms_.erase(it);
  }

  Polynomial& operator+=(const Polynomial& other) {
    check_nvars(other);
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& other) {
    check_nvars(other);
    for (const auto& [m, c] : other.terms_) add_term(m, -c);
    return *this;
  }
  Polynomial& operator*=(double s) {
    TermMap scaled;
    for (const auto& [m, c] : terms_) {
      Scalar v = c * s;
      if (!CoefficientTraits<Scalar>::negligible(v)) scaled.emplace(m, v);
    }
    terms_ = std::move(scaled);
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) {
    return a += b;
  }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) {
    return a -= b;
  }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// ∂p/∂x_i.
  Polynomial derivative(int i) const {
    Polynomial out(nvars_);
    for (const auto& [m, c] : terms_) {
      const int e = m[i];
      if (e == 0) continue;
      out.add_term(m.lowered(i), c * static_cast<double>(e));
    }
    return out;
  }

  void check_nvars(const Polynomial& other) const {
    if (other.nvars_ != nvars_) {
      throw ShapeError("polynomials over different variable counts");
    }
  }

 private:
  int nvars_ = 0;
  TermMap terms_;
};

template <typename A, typename B>
using ProductScalar = decltype(std::declval<A>() * std::declval<B>());

template <typename A, typename B>
Polynomial<ProductScalar<A, B>> operator*(const Polynomial<A>& a,
                                          const Polynomial<B>& b) {
  if (a.nvars() != b.nvars()) {
    throw ShapeError("polynomial product over different variable counts");
  }
  Polynomial<ProductScalar<A, B>> out(a.nvars());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) out.add_term(ma * mb, ca * cb);
  }
  return out;
}

inline double evaluate(const Polynomial<double>& p,
                       const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != p.nvars()) {
    throw ShapeError("evaluation point has length " + std::to_string(x.size()) +
                     ", polynomial has " + std::to_string(p.nvars()) +
                     " variables");
  }
  double value = 0.0;
  for (const auto& [m, c] : p.terms()) value += c * m.evaluate(x.data());
  return value;
}

/// Replaces every affine coefficient by its value at decision vector v.
inline Polynomial<double> substitute(const Polynomial<AffineExpr>& p,
                                     const Eigen::Ref<const Eigen::VectorXd>& v) {
  Polynomial<double> out(p.nvars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, c.evaluate(v));
  return out;
}

inline Polynomial<AffineExpr> lift(const Polynomial<double>& p) {
  Polynomial<AffineExpr> out(p.nvars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, AffineExpr(c));
  return out;
}

std::string to_string(const Polynomial<double>& p);

/// Dense rows × cols grid of polynomials sharing one variable count.
template <typename Scalar>
class MatrixPolynomial {
 public:
  using Entry = Polynomial<Scalar>;

  MatrixPolynomial() = default;
  MatrixPolynomial(int rows, int cols, int nvars)
      : rows_(rows), cols_(cols), nvars_(nvars),
        entries_(static_cast<size_t>(rows) * cols, Entry(nvars)) {}

  static MatrixPolynomial identity(int k, int nvars) {
    MatrixPolynomial out(k, k, nvars);
    for (int i = 0; i < k; ++i) out(i, i) = Entry::constant(nvars, Scalar(1.0));
    return out;
  }
  static MatrixPolynomial constant(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                   int nvars) {
    MatrixPolynomial out(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                         nvars);
    for (int i = 0; i < out.rows_; ++i) {
      for (int j = 0; j < out.cols_; ++j) {
        if (m(i, j) != 0.0) out(i, j) = Entry::constant(nvars, Scalar(m(i, j)));
      }
    }
    return out;
  }
  /// Column vector from a list of entries.
  static MatrixPolynomial column(const std::vector<Entry>& entries, int nvars) {
    MatrixPolynomial out(static_cast<int>(entries.size()), 1, nvars);
    for (size_t i = 0; i < entries.size(); ++i) {
      entries[i].check_nvars(Entry(nvars));
      out.entries_[i] = entries[i];
    }
    return out;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nvars() const { return nvars_; }

  Entry& operator()(int i, int j) { return entries_[index(i, j)]; }
  const Entry& operator()(int i, int j) const { return entries_[index(i, j)]; }

  int degree() const {
    int d = 0;
    for (const auto& e : entries_) d = std::max(d, e.degree());
    return d;
  }
  bool is_zero() const {
    for (const auto& e : entries_) {
      if (!e.is_zero()) return false;
    }
    return true;
  }

  MatrixPolynomial transpose() const {
    MatrixPolynomial out(cols_, rows_, nvars_);
    for (int i = 0; i < rows_; ++i) {
      for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    }
    return out;
  }

  MatrixPolynomial block(int row, int col, int nrows, int ncols) const {
    if (row < 0 || col < 0 || row + nrows > rows_ || col + ncols > cols_) {
      throw ShapeError("block out of range");
    }
    MatrixPolynomial out(nrows, ncols, nvars_);
    for (int i = 0; i < nrows; ++i) {
      for (int j = 0; j < ncols; ++j) out(i, j) = (*this)(row + i, col + j);
    }
    return out;
  }

  void set_block(int row, int col, const MatrixPolynomial& b) {
    if (b.nvars_ != nvars_) throw ShapeError("block variable count mismatch");
    if (row < 0 || col < 0 || row + b.rows_ > rows_ || col + b.cols_ > cols_) {
      throw ShapeError("block out of range");
    }
    for (int i = 0; i < b.rows_; ++i) {
      for (int j = 0; j < b.cols_; ++j) (*this)(row + i, col + j) = b(i, j);
    }
  }

  MatrixPolynomial& operator+=(const MatrixPolynomial& other) {
    check_same_shape(other);
    for (size_t k = 0; k < entries_.size(); ++k) entries_[k] += other.entries_[k];
    return *this;
  }
  MatrixPolynomial& operator-=(const MatrixPolynomial& other) {
    check_same_shape(other);
    for (size_t k = 0; k < entries_.size(); ++k) entries_[k] -= other.entries_[k];
    return *this;
  }
  MatrixPolynomial& operator*=(double s) {
    for (auto& e : entries_) e *= s;
    return *this;
  }

  friend MatrixPolynomial operator+(MatrixPolynomial a,
                                    const MatrixPolynomial& b) {
    return a += b;
  }
  friend MatrixPolynomial operator-(MatrixPolynomial a,
                                    const MatrixPolynomial& b) {
    return a -= b;
  }
  friend MatrixPolynomial operator-(MatrixPolynomial a) { return a *= -1.0; }
  friend MatrixPolynomial operator*(MatrixPolynomial a, double s) {
    return a *= s;
  }
  friend MatrixPolynomial operator*(double s, MatrixPolynomial a) {
    return a *= s;
  }
  friend bool operator==(const MatrixPolynomial& a, const MatrixPolynomial& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.nvars_ == b.nvars_ &&
           a.entries_ == b.entries_;
  }

  void check_same_shape(const MatrixPolynomial& other) const {
    if (other.rows_ != rows_ || other.cols_ != cols_) {
      throw ShapeError("matrix polynomial shapes " + shape_string() + " and " +
                       other.shape_string() + " differ");
    }
    if (other.nvars_ != nvars_) {
      throw ShapeError("matrix polynomials over different variable counts");
    }
  }
  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  size_t index(int i, int j) const {
    return static_cast<size_t>(i) * cols_ + j;
  }

  int rows_ = 0;
  int cols_ = 0;
  int nvars_ = 0;
  std::vector<Entry> entries_;
};

template <typename A, typename B>
MatrixPolynomial<ProductScalar<A, B>> operator*(const MatrixPolynomial<A>& a,
                                                const MatrixPolynomial<B>& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("cannot multiply " + a.shape_string() + " by " +
                     b.shape_string());
  }
  if (a.nvars() != b.nvars()) {
    throw ShapeError("matrix polynomials over different variable counts");
  }
  MatrixPolynomial<ProductScalar<A, B>> out(a.rows(), b.cols(), a.nvars());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < b.cols(); ++j) {
      auto& acc = out(i, j);
      for (int k = 0; k < a.cols(); ++k) {
        if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
        acc += a(i, k) * b(k, j);
      }
    }
  }
  return out;
}

/// Entrywise scaling of a matrix by a scalar polynomial.
template <typename A, typename B>
MatrixPolynomial<ProductScalar<A, B>> operator*(const Polynomial<A>& s,
                                                const MatrixPolynomial<B>& m) {
  MatrixPolynomial<ProductScalar<A, B>> out(m.rows(), m.cols(), m.nvars());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out(i, j) = s * m(i, j);
  }
  return out;
}

/// Product with a constant real matrix on the left.
template <typename Scalar>
MatrixPolynomial<Scalar> operator*(const Eigen::MatrixXd& a,
                                   const MatrixPolynomial<Scalar>& m) {
  if (a.cols() != m.rows()) throw ShapeError("constant * matrix shape mismatch");
  MatrixPolynomial<Scalar> out(static_cast<int>(a.rows()), m.cols(), m.nvars());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      for (int k = 0; k < a.cols(); ++k) {
        if (a(i, k) != 0.0 && !m(k, j).is_zero()) out(i, j) += m(k, j) * a(i, k);
      }
    }
  }
  return out;
}

/// Product with a constant real matrix on the right.
template <typename Scalar>
MatrixPolynomial<Scalar> operator*(const MatrixPolynomial<Scalar>& m,
                                   const Eigen::MatrixXd& a) {
  if (m.cols() != a.rows()) throw ShapeError("matrix * constant shape mismatch");
  MatrixPolynomial<Scalar> out(m.rows(), static_cast<int>(a.cols()), m.nvars());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      for (int k = 0; k < m.cols(); ++k) {
        if (a(k, j) != 0.0 && !m(i, k).is_zero()) out(i, j) += m(i, k) * a(k, j);
      }
    }
  }
  return out;
}

template <typename Scalar>
MatrixPolynomial<Scalar> hstack(const MatrixPolynomial<Scalar>& a,
                                const MatrixPolynomial<Scalar>& b) {
  if (a.rows() != b.rows()) throw ShapeError("hstack row mismatch");
  MatrixPolynomial<Scalar> out(a.rows(), a.cols() + b.cols(), a.nvars());
  out.set_block(0, 0, a);
  out.set_block(0, a.cols(), b);
  return out;
}

template <typename Scalar>
MatrixPolynomial<Scalar> vstack(const MatrixPolynomial<Scalar>& a,
                                const MatrixPolynomial<Scalar>& b) {
  if (a.cols() != b.cols()) throw ShapeError("vstack column mismatch");
  MatrixPolynomial<Scalar> out(a.rows() + b.rows(), a.cols(), a.nvars());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), 0, b);
  return out;
}

/// Symmetric 2×2 block matrix [A Bᵀ; B C].
template <typename Scalar>
MatrixPolynomial<Scalar> symmetric_blocks(const MatrixPolynomial<Scalar>& a,
                                          const MatrixPolynomial<Scalar>& b,
                                          const MatrixPolynomial<Scalar>& c) {
  if (a.rows() != a.cols() || c.rows() != c.cols() || b.rows() != c.rows() ||
      b.cols() != a.cols()) {
    throw ShapeError("incompatible symmetric block shapes");
  }
  MatrixPolynomial<Scalar> out(a.rows() + c.rows(), a.rows() + c.rows(),
                               a.nvars());
  out.set_block(0, 0, a);
  out.set_block(a.rows(), 0, b);
  out.set_block(0, a.cols(), b.transpose());
  out.set_block(a.rows(), a.cols(), c);
  return out;
}

template <typename Scalar>
MatrixPolynomial<Scalar> lift(const MatrixPolynomial<double>& m) {
  MatrixPolynomial<Scalar> out(m.rows(), m.cols(), m.nvars());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      for (const auto& [mono, c] : m(i, j).terms()) {
        out(i, j).add_term(mono, Scalar(c));
      }
    }
  }
  return out;
}

inline Eigen::MatrixXd evaluate(const MatrixPolynomial<double>& m,
                                const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != m.nvars()) {
    throw ShapeError("evaluation point has length " + std::to_string(x.size()) +
                     ", matrix polynomial has " + std::to_string(m.nvars()) +
                     " variables");
  }
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out(i, j) = evaluate(m(i, j), x);
  }
  return out;
}

inline MatrixPolynomial<double> substitute(
    const MatrixPolynomial<AffineExpr>& m,
    const Eigen::Ref<const Eigen::VectorXd>& v) {
  MatrixPolynomial<double> out(m.rows(), m.cols(), m.nvars());
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) out(i, j) = substitute(m(i, j), v);
  }
  return out;
}

/// (i, j) entry is ∂vᵢ/∂xⱼ for a column vector v.
template <typename Scalar>
MatrixPolynomial<Scalar> jacobian(const MatrixPolynomial<Scalar>& v) {
  if (v.cols() != 1) {
    throw ShapeError("jacobian expects a column vector, got " + v.shape_string());
  }
  MatrixPolynomial<Scalar> out(v.rows(), v.nvars(), v.nvars());
  for (int i = 0; i < v.rows(); ++i) {
    for (int j = 0; j < v.nvars(); ++j) out(i, j) = v(i, 0).derivative(j);
  }
  return out;
}

/// Largest coefficient magnitude over all entries.
double max_abs_coefficient(const MatrixPolynomial<double>& m);

std::string to_string(const MatrixPolynomial<double>& m);

}  // namespace polystab
