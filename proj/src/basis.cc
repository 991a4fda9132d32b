#include "polystab/basis.h"

#include <set>

namespace polystab {

namespace {

// Single monomial stored in a polynomial entry, or nullptr.
const Monomial* sole_monomial(const Polynomial<double>& p) {
  if (p.terms().size() != 1) return nullptr;
  const auto& [m, c] = *p.terms().begin();
  return std::abs(c - 1.0) < kDropTolerance ? &m : nullptr;
}

}  // namespace

PolyMatrix build_power_vector(int n, int dmin, int dmax) {
  if (n < 1 || dmin < 1 || dmax < dmin) {
    throw ShapeError("invalid power vector degree range [" +
                     std::to_string(dmin) + ", " + std::to_string(dmax) + "]");
  }
  return monomial_vector(monomials_of_degree(n, dmin, dmax));
}

PolyMatrix monomial_vector(const std::vector<Monomial>& monomials) {
  if (monomials.empty()) throw ShapeError("empty monomial list");
  const int n = monomials.front().nvars();
  PolyMatrix out(static_cast<int>(monomials.size()), 1, n);
  for (size_t i = 0; i < monomials.size(); ++i) {
    out(static_cast<int>(i), 0) = Polynomial<double>::from_monomial(monomials[i]);
  }
  return out;
}

PolyMatrix factorize(const PolyMatrix& z, const PolyMatrix& zhat) {
  if (z.cols() != 1 || zhat.cols() != 1) {
    throw ShapeError("factorize expects column vectors");
  }
  if (z.nvars() != zhat.nvars()) {
    throw ShapeError("Z and Zhat have different variable counts");
  }
  std::vector<Monomial> hat;
  for (int j = 0; j < zhat.rows(); ++j) {
    const Monomial* m = sole_monomial(zhat(j, 0));
    if (!m) throw FactorizationError("Zhat entry " + std::to_string(j) +
                                     " is not a monomial");
    hat.push_back(*m);
  }
  PolyMatrix h(z.rows(), zhat.rows(), z.nvars());
  for (int i = 0; i < z.rows(); ++i) {
    const Monomial* zi = sole_monomial(z(i, 0));
    if (!zi) throw FactorizationError("Z entry " + std::to_string(i) +
                                      " is not a monomial");
    int best = -1;
    for (int j = 0; j < static_cast<int>(hat.size()); ++j) {
      if (hat[j].divides(*zi) && (best < 0 || hat[j].degree() > hat[best].degree())) {
        best = j;
      }
    }
    if (best < 0) {
      throw FactorizationError("monomial " + zi->to_string() +
                               " is not divisible by any entry of Zhat");
    }
    h(i, best) = Polynomial<double>::from_monomial(*zi / hat[best]);
  }
  return h;
}

bool BasisSpec::input_field_constant() const {
  return W == PolyMatrix::identity(m, n);
}

BasisSpec BasisSpec::from_degrees(int n, int m, int zmin, int zmax,
                                  int zhat_max) {
  return from_degrees(n, zmin, zmax, zhat_max, PolyMatrix::identity(m, n));
}

BasisSpec BasisSpec::from_degrees(int n, int zmin, int zmax, int zhat_max,
                                  const PolyMatrix& w) {
  if (w.nvars() != n) throw ShapeError("W(x) variable count differs from n");
  BasisSpec spec;
  spec.n = n;
  spec.m = w.cols();
  spec.Z = build_power_vector(n, zmin, zmax);
  spec.Zhat = build_power_vector(n, 1, zhat_max);
  spec.H = factorize(spec.Z, spec.Zhat);
  spec.W = w;
  return spec;
}

bool BasisDiagnostics::ok() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const BasisCheck* BasisDiagnostics::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

BasisDiagnostics validate_basis(const BasisSpec& spec) {
  BasisDiagnostics diag;
  const int n = spec.n;

  {
    BasisCheck c{"zhat_leads_with_x", true, ""};
    if (spec.Zhat.rows() < n) {
      c.passed = false;
      c.detail = "Zhat has fewer than n entries";
    } else {
      for (int i = 0; i < n && c.passed; ++i) {
        if (!(spec.Zhat(i, 0) == Polynomial<double>::variable(n, i))) {
          c.passed = false;
          c.detail = "Zhat entry " + std::to_string(i) + " is " +
                     to_string(spec.Zhat(i, 0)) + ", expected x" +
                     std::to_string(i + 1);
        }
      }
    }
    diag.checks.push_back(c);
  }

  {
    BasisCheck c{"z_vanishes_at_origin", true, ""};
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    const Eigen::MatrixXd z0 = evaluate(spec.Z, zero);
    const Eigen::MatrixXd zh0 = evaluate(spec.Zhat, zero);
    if (z0.cwiseAbs().maxCoeff() > 0.0 || zh0.cwiseAbs().maxCoeff() > 0.0) {
      c.passed = false;
      c.detail = "Z or Zhat has a constant term";
    }
    diag.checks.push_back(c);
  }

  {
    BasisCheck c{"z_distinct_monomials", true, ""};
    std::set<Monomial> seen;
    for (int i = 0; i < spec.Z.rows(); ++i) {
      const auto& e = spec.Z(i, 0);
      if (e.terms().size() != 1) {
        c.passed = false;
        c.detail = "Z entry " + std::to_string(i) + " is not a monomial";
        break;
      }
      if (!seen.insert(e.terms().begin()->first).second) {
        c.passed = false;
        c.detail = "Z entry " + std::to_string(i) + " repeats a monomial";
        break;
      }
    }
    diag.checks.push_back(c);
  }

  {
    BasisCheck c{"z_equals_h_zhat", true, ""};
    try {
      const PolyMatrix residual = spec.Z - spec.H * spec.Zhat;
      if (!residual.is_zero()) {
        c.passed = false;
        c.detail = "Z - H*Zhat has max coefficient " +
                   std::to_string(max_abs_coefficient(residual));
      }
    } catch (const ShapeError& e) {
      c.passed = false;
      c.detail = e.what();
    }
    diag.checks.push_back(c);
  }
  return diag;
}

}  // namespace polystab
