#include "polystab/systems.h"

#include "polystab/errors.h"

namespace polystab {

namespace {

using Poly = Polynomial<double>;

GroundTruth vanderpol() {
  const Poly x1 = Poly::variable(2, 0);
  const Poly x2 = Poly::variable(2, 1);
  GroundTruth gt;
  gt.f = PolyMatrix(2, 1, 2);
  gt.f(0, 0) = x2;
  gt.f(1, 0) = x2 - x1 - x1 * x1 * x2;
  gt.g = PolyMatrix(2, 1, 2);
  gt.g(1, 0) = Poly::constant(2, 1.0);
  return gt;
}

GroundTruth scalar(const Poly& f) {
  GroundTruth gt;
  gt.f = PolyMatrix(1, 1, 1);
  gt.f(0, 0) = f;
  gt.g = PolyMatrix::identity(1, 1);
  return gt;
}

}  // namespace

std::vector<std::string> builtin_system_names() {
  return {"vanderpol", "linear1d", "scalar-cubic", "integrator"};
}

GroundTruth builtin_system(const std::string& name) {
  const Poly x = Poly::variable(1, 0);
  if (name == "vanderpol") return vanderpol();
  if (name == "linear1d") return scalar(x);
  if (name == "scalar-cubic") return scalar(x * x * x);
  if (name == "integrator") return scalar(Poly(1));
  throw ConfigError("unknown system '" + name + "'");
}

BasisSpec default_basis(const std::string& name) {
  if (name == "vanderpol") return BasisSpec::from_degrees(2, 1, 1, 3);
  if (name == "scalar-cubic") return BasisSpec::from_degrees(1, 1, 1, 3);
  if (name == "linear1d" || name == "integrator") return BasisSpec::from_degrees(1, 1, 1, 1);
  throw ConfigError("unknown system '" + name + "'");
}

}  // namespace polystab
