#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

namespace polystab {

/// A monomial x₁^e₁ ⋯ x_n^e_n stored as its exponent vector.
///
/// Ordering is graded lexicographic: lower total degree first, and within a
/// degree x₁ outranks x₂ (so x₁² < x₁x₂ < x₂²). Every container keyed by
/// Monomial inherits this order, which keeps all constructions deterministic.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int nvars) : exponents_(nvars, 0) {}
  explicit Monomial(std::vector<int> exponents);
  Monomial(std::initializer_list<int> exponents)
      : Monomial(std::vector<int>(exponents)) {}

  static Monomial variable(int nvars, int index);

  int nvars() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exponents_[i]; }
  const std::vector<int>& exponents() const { return exponents_; }

  bool is_constant() const { return degree_ == 0; }
  bool divides(const Monomial& other) const;

  /// Exponent-wise sum.
  Monomial operator*(const Monomial& other) const;
  /// Exponent-wise difference; requires divisor.divides(*this).
  Monomial operator/(const Monomial& divisor) const;

  /// Decrements exponent i (used by differentiation); requires exponent > 0.
  Monomial lowered(int i) const;

  double evaluate(const double* x) const;

  std::string to_string() const;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.exponents_ == b.exponents_;
  }
  friend std::strong_ordering operator<=>(const Monomial& a,
                                          const Monomial& b);

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

/// All monomials in `nvars` variables with total degree in [dmin, dmax], in
/// graded lexicographic order.
std::vector<Monomial> monomials_of_degree(int nvars, int dmin, int dmax);

}  // namespace polystab
