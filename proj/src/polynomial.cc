#include "polystab/polynomial.h"

#include <sstream>

namespace polystab {

std::string to_string(const Polynomial<double>& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  os.precision(6);
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    os << std::abs(c);
    if (!m.is_constant()) os << "*" << m.to_string();
    first = false;
  }
  return os.str();
}

double max_abs_coefficient(const MatrixPolynomial<double>& m) {
  double out = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      for (const auto& [mono, c] : m(i, j).terms()) out = std::max(out, std::abs(c));
    }
  }
  return out;
}

std::string to_string(const MatrixPolynomial<double>& m) {
  std::ostringstream os;
  for (int i = 0; i < m.rows(); ++i) {
    os << "[";
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ", ";
      os << to_string(m(i, j));
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace polystab
