#include "polystab/monomial.h"

#include <cmath>
#include <sstream>

#include "polystab/errors.h"

namespace polystab {

Monomial::Monomial(std::vector<int> exponents)
    : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw ShapeError("monomial exponents must be non-negative");
    degree_ += e;
  }
}

Monomial Monomial::variable(int nvars, int index) {
  Monomial m(nvars);
  m.exponents_.at(index) = 1;
  m.degree_ = 1;
  return m;
}

bool Monomial::divides(const Monomial& other) const {
  if (other.nvars() != nvars()) return false;
  for (int i = 0; i < nvars(); ++i) {
    if (exponents_[i] > other.exponents_[i]) return false;
  }
  return true;
}

Monomial Monomial::operator*(const Monomial& other) const {
  if (other.nvars() != nvars()) {
    throw ShapeError("monomial product over different variable counts");
  }
  Monomial out(*this);
  for (int i = 0; i < nvars(); ++i) out.exponents_[i] += other.exponents_[i];
  out.degree_ += other.degree_;
  return out;
}

Monomial Monomial::operator/(const Monomial& divisor) const {
  if (!divisor.divides(*this)) {
    throw ShapeError("monomial " + divisor.to_string() + " does not divide " +
                     to_string());
  }
  Monomial out(*this);
  for (int i = 0; i < nvars(); ++i) out.exponents_[i] -= divisor.exponents_[i];
  out.degree_ -= divisor.degree_;
  return out;
}

Monomial Monomial::lowered(int i) const {
  Monomial out(*this);
  --out.exponents_.at(i);
  --out.degree_;
  return out;
}

double Monomial::evaluate(const double* x) const {
  double value = 1.0;
  for (int i = 0; i < nvars(); ++i) {
    for (int k = 0; k < exponents_[i]; ++k) value *= x[i];
  }
  return value;
}

std::string Monomial::to_string() const {
  if (degree_ == 0) return "1";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < nvars(); ++i) {
    if (exponents_[i] == 0) continue;
    if (!first) os << "*";
    os << "x" << (i + 1);
    if (exponents_[i] > 1) os << "^" << exponents_[i];
    first = false;
  }
  return os.str();
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (a.degree_ != b.degree_) return a.degree_ <=> b.degree_;
  // Larger leading exponent sorts first within a degree.
  return b.exponents_ <=> a.exponents_;
}

namespace {
void enumerate(int nvars, int var, int remaining, std::vector<int>& current,
               std::vector<Monomial>& out) {
  if (var == nvars - 1) {
    current[var] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[var] = e;
    enumerate(nvars, var + 1, remaining - e, current, out);
  }
  current[var] = 0;
}
}  // namespace

std::vector<Monomial> monomials_of_degree(int nvars, int dmin, int dmax) {
  if (nvars < 1 || dmin < 0 || dmax < dmin) {
    throw ShapeError("invalid monomial degree range");
  }
  std::vector<Monomial> out;
  std::vector<int> current(nvars, 0);
  for (int d = dmin; d <= dmax; ++d) enumerate(nvars, 0, d, current, out);
  return out;
}

}  // namespace polystab
