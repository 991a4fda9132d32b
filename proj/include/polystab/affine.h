#pragma once

#include <cmath>
#include <map>
#include <ostream>

#include <Eigen/Core>

namespace polystab {

/// Coefficients below this magnitude are dropped when canonicalizing.
inline constexpr double kDropTolerance = 1e-12;

/// An affine function c₀ + Σ cᵢ vᵢ of the decision vector v.
///
/// Used as the coefficient ring of Polynomial when building SOS programs:
/// a polynomial whose coefficients are affine in the unknowns. The product
/// of two AffineExpr is deliberately not defined, so bilinear terms cannot
/// be formed by accident.
class AffineExpr {
 public:
  using TermMap = std::map<int, double>;

  AffineExpr() = default;
  AffineExpr(double constant) : constant_(constant) {}  // NOLINT
  static AffineExpr variable(int index, double coefficient = 1.0) {
    AffineExpr e;
    e.terms_[index] = coefficient;
    return e;
  }

  double constant() const { return constant_; }
  const TermMap& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }
  bool is_zero() const {
    return terms_.empty() && std::abs(constant_) < kDropTolerance;
  }

  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& v) const {
    double out = constant_;
    for (const auto& [index, c] : terms_) out += c * v[index];
    return out;
  }

  AffineExpr& operator+=(const AffineExpr& other) {
    constant_ += other.constant_;
    for (const auto& [index, c] : other.terms_) accumulate(index, c);
    return *this;
  }
  AffineExpr& operator-=(const AffineExpr& other) {
    constant_ -= other.constant_;
    for (const auto& [index, c] : other.terms_) accumulate(index, -c);
    return *this;
  }
  AffineExpr& operator*=(double s) {
    constant_ *= s;
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      if (std::abs(it->second) < kDropTolerance) {
        it = terms_.erase(it);
      } else {
        ++it;
      }
    }
    return *this;
  }

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) {
    return a += b;
  }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) {
    return a -= b;
  }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }

  friend bool operator==(const AffineExpr& a, const AffineExpr& b) {
    return a.constant_ == b.constant_ && a.terms_ == b.terms_;
  }

  friend std::ostream& operator<<(std::ostream& os, const AffineExpr& e) {
    os << e.constant_;
    for (const auto& [index, c] : e.terms_) os << " + " << c << "*v" << index;
    return os;
  }

 private:
  void accumulate(int index, double c) {
    auto [it, inserted] = terms_.try_emplace(index, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kDropTolerance) terms_.erase(it);
  }

  double constant_ = 0.0;
  TermMap terms_;
};

}  // namespace polystab
