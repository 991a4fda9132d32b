#include "polystab/synthesis.h"

#include <Eigen/Dense>

#include "polystab/errors.h"
#include "polystab/log.h"

namespace polystab {

std::string to_string(Method m) {
  switch (m) {
    case Method::kThm1: return "thm1";
    case Method::kRemark1: return "remark1";
    case Method::kThm2: return "thm2";
    case Method::kCor1: return "cor1";
    case Method::kLsq: return "lsq";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::kThm1, Method::kRemark1, Method::kThm2, Method::kCor1,
                   Method::kLsq}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown method '" + name + "' (expected thm1|remark1|thm2|cor1|lsq)");
}

bool has_equality_constraint(Method m) { return m != Method::kCor1; }

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, double cutoff) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  if (s.size() > 0 && s(0) > 0.0) {
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (s(i) > cutoff * s(0)) inv(i) = 1.0 / s(i);
    }
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::MatrixXd least_squares_model(const DataSet& ds) {
  return ds.X1 * pseudo_inverse(ds.Wbar0);
}

VariableCounts SosSynthesis::counts() const {
  VariableCounts c;
  c.total = program.num_vars();
  const auto& blocks = program.blocks();
  if (p_block >= 0) c.P = svec_size(blocks[p_block].size);
  for (const auto& g : program.gram_constraints()) {
    if (g.block >= 0) c.gram += svec_size(blocks[g.block].size);
  }
  std::vector<bool> seen(c.total, false);
  auto count_vars = [&](const AffineMatrix& m) {
    int k = 0;
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) {
        for (const auto& [mono, e] : m(i, j).terms()) {
          for (const auto& [index, coef] : e.terms()) {
            if (!seen[index]) {
              seen[index] = true;
              ++k;
            }
          }
        }
      }
    }
    return k;
  };
  auto as_matrix = [&](const AffinePoly& p) {
    AffineMatrix m(1, 1, p.nvars());
    m(0, 0) = p;
    return m;
  };
  c.YorK = count_vars(YorK);
  c.eps1 = count_vars(as_matrix(eps1));
  c.eps2 = count_vars(as_matrix(eps2));
  return c;
}

Eigen::MatrixXd SosSynthesis::P(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  const auto& blk = program.blocks()[p_block];
  return rho * Eigen::MatrixXd::Identity(blk.size, blk.size) +
         smat(v.segment(blk.offset, svec_size(blk.size)), blk.size);
}

void check_options(const SynthesisProblem& pr) {
  const auto& o = pr.opts;
  if (o.deg_y < 0) throw ConfigError("deg_y must be >= 0");
  if (o.deg_eps1 < 2 || o.deg_eps1 % 2 != 0) {
    throw ConfigError("deg_eps1 must be even and >= 2");
  }
  if (o.deg_eps2 < 0 || o.deg_eps2 % 2 != 0) {
    throw ConfigError("deg_eps2 must be even and >= 0");
  }
  if (o.delta < 0.0) throw ConfigError("delta must be >= 0");
  if (o.rho <= 0.0) throw ConfigError("rho must be > 0");
  const auto& s = pr.spec;
  const auto& d = pr.data;
  if (d.X0.rows() != s.n || d.Z0.rows() != s.N() || d.Ubar0.rows() != s.q() ||
      d.U0.rows() != s.m) {
    throw ShapeError("data set does not match the basis dimensions");
  }
  if (d.RD.rows() != s.n) throw ShapeError("RD must have n rows");
}

namespace {

/// Common scaffolding: P, Y or K, ε₁, ε₂ created in a fixed order so that
/// variable indices agree across methods.
struct Scaffold {
  SosSynthesis out;
  AffineMatrix P;
  PolyMatrix dZhat;  // ∂Ẑ/∂x, p×n
};

Scaffold scaffold(const SynthesisProblem& pr, int yk_rows, const std::string& yk_name) {
  check_options(pr);
  const auto& s = pr.spec;
  const int n = s.n;
  const int p = s.p();
  Scaffold sc;
  SosSynthesis& out = sc.out;
  out.method = pr.method;
  out.program = SosProgram(n);
  out.rho = pr.opts.rho;
  out.p = p;
  SosProgram& prog = out.program;

  out.p_block = prog.new_psd("P", p);
  sc.P = prog.psd_matrix(out.p_block) +
         lift<AffineExpr>(PolyMatrix::identity(p, n) * pr.opts.rho);

  const std::vector<Monomial> monos = monomials_of_degree(n, 0, pr.opts.deg_y);
  const int L = static_cast<int>(monos.size());
  const int offset = prog.new_free(yk_name, yk_rows * p * L);
  out.YorK = AffineMatrix(yk_rows, p, n);
  for (int i = 0; i < yk_rows; ++i) {
    for (int j = 0; j < p; ++j) {
      for (int k = 0; k < L; ++k) {
        out.YorK(i, j).add_term(monos[k],
                                AffineExpr::variable(offset + (i * p + j) * L + k));
      }
    }
  }

  out.eps1 = prog.new_sos_polynomial("eps1_gram", monomials_of_degree(n, 0, pr.opts.deg_eps1 / 2)) +
             AffinePoly::constant(n, AffineExpr(pr.opts.delta));

  if (pr.opts.deg_eps2 == 0) {
    out.eps2 = AffinePoly::constant(n, prog.psd_entry(prog.new_psd("eps2", 1), 0, 0));
  } else {
    out.eps2 = prog.new_sos_polynomial("eps2_gram",
                                       monomials_of_degree(n, 0, pr.opts.deg_eps2 / 2));
  }
  sc.dZhat = jacobian(s.Zhat);
  return sc;
}

AffineMatrix identity_times(const AffinePoly& e, int k, int n) {
  return e * PolyMatrix::identity(k, n);
}

void add_equality(Scaffold& sc, const SynthesisProblem& pr) {
  const auto& s = pr.spec;
  AffineMatrix eq = pr.data.Z0 * sc.out.YorK - s.H * sc.P;
  sc.out.program.add_polynomial_identity("Z0*Y=H*P", eq);
  sc.out.equality = std::move(eq);
}

void finish(Scaffold& sc, const SynthesisProblem& pr, const AffineMatrix& condition) {
  SosSynthesis& out = sc.out;
  out.condition = condition;
  out.condition_gram = out.program.add_sos_matrix("condition", condition);
  if (pr.opts.trace_objective) {
    int largest = -1;
    for (const auto& g : out.program.gram_constraints()) {
      if (g.block >= 0 &&
          (largest < 0 || out.program.blocks()[g.block].size > out.program.blocks()[largest].size)) {
        largest = g.block;
      }
    }
    if (largest >= 0) out.program.minimize_trace(largest);
  }
  const RichnessReport rich = validate_richness(pr.data, pr.spec);
  if (rich.warning) out.warnings.push_back(rich.message);
  const VariableCounts c = out.counts();
  log_info("{}: {} decision variables (P {}, Y/K {}, eps1 {}, eps2 {}, gram {}), block size {}",
           to_string(pr.method), c.total, c.P, c.YorK, c.eps1, c.eps2, c.gram,
           condition.rows());
}

/// Rows/cols of the top-left p×p block: −J·X·Y − (·)ᵀ − ε₂·J·R·Rᵀ·Jᵀ − ε₁I.
AffineMatrix upsilon_block(const Scaffold& sc, const PolyMatrix& jx, const Eigen::MatrixXd& R,
                           int n) {
  const SosSynthesis& out = sc.out;
  const AffineMatrix cross = jx * out.YorK;
  const PolyMatrix jr = sc.dZhat * R;
  return -(cross + cross.transpose()) - out.eps2 * (jr * jr.transpose()) -
         identity_times(out.eps1, out.p, n);
}

}  // namespace

SosSynthesis build_thm1(const SynthesisProblem& pr) {
  if (!pr.data.RB) {
    throw ConfigError("thm1 needs an input-matrix bound RB (BB^T <= RB RB^T); pass --rb");
  }
  const auto& s = pr.spec;
  const auto& d = pr.data;
  const int n = s.n;
  const int T = d.T;
  if (d.RB->rows() != n || d.RB->cols() != s.q()) throw ShapeError("RB must be n x q");
  Scaffold sc = scaffold(pr, T, "Y");
  add_equality(sc, pr);

  Eigen::MatrixXd RE(n, d.RB->cols() + d.RD.cols());
  RE << *d.RB, d.RD;
  // Û₀(x) = [Ū₀ − W(x)U₀; I_T]
  const PolyMatrix u0hat =
      vstack(PolyMatrix::constant(d.Ubar0, n) - s.W * d.U0, PolyMatrix::identity(T, n));
  const AffineMatrix tl = upsilon_block(sc, sc.dZhat * d.X1, RE, n);
  const AffineMatrix bl = u0hat * sc.out.YorK;
  const AffineMatrix br = identity_times(sc.out.eps2, s.q() + T, n);
  finish(sc, pr, symmetric_blocks(tl, bl, br));
  return std::move(sc.out);
}

SosSynthesis build_remark1(const SynthesisProblem& pr) {
  const auto& s = pr.spec;
  if (!s.input_field_constant()) {
    throw ConfigError("remark1 requires W(x) = I (input vector field independent of x)");
  }
  const auto& d = pr.data;
  const int n = s.n;
  const int T = d.T;
  Scaffold sc = scaffold(pr, T, "Y");
  add_equality(sc, pr);
  const AffineMatrix tl = upsilon_block(sc, sc.dZhat * d.X1, d.RD, n);
  const AffineMatrix br = identity_times(sc.out.eps2, T, n);
  finish(sc, pr, symmetric_blocks(tl, sc.out.YorK, br));
  return std::move(sc.out);
}

namespace {

/// Shared Υ_D block and (2,2) block of the S-parametrized conditions; the
/// caller supplies W₀(x)·Y(x) or its replacement [W(x)K(x); H(x)P].
AffineMatrix s_condition(const Scaffold& sc, const SynthesisProblem& pr,
                         const AffineMatrix& w0y) {
  const auto& d = pr.data;
  const int n = pr.spec.n;
  const SosSynthesis& out = sc.out;
  const Eigen::MatrixXd gram = d.X1 * d.X1.transpose() - d.RD * d.RD.transpose();
  const AffineMatrix tl = out.eps2 * (sc.dZhat * gram * sc.dZhat.transpose()) -
                          identity_times(out.eps1, out.p, n);
  const PolyMatrix wx = PolyMatrix::constant(d.Wbar0 * d.X1.transpose(), n) *
                        sc.dZhat.transpose();
  const AffineMatrix bl = -w0y - out.eps2 * wx;
  const AffineMatrix br =
      out.eps2 * PolyMatrix::constant(d.Wbar0 * d.Wbar0.transpose(), n);
  return symmetric_blocks(tl, bl, br);
}

}  // namespace

SosSynthesis build_thm2(const SynthesisProblem& pr) {
  const auto& s = pr.spec;
  const auto& d = pr.data;
  const int n = s.n;
  Scaffold sc = scaffold(pr, d.T, "Y");
  add_equality(sc, pr);
  const PolyMatrix w0 = vstack(s.W * d.U0, PolyMatrix::constant(d.Z0, n));
  finish(sc, pr, s_condition(sc, pr, w0 * sc.out.YorK));
  return std::move(sc.out);
}

SosSynthesis build_cor1(const SynthesisProblem& pr) {
  const auto& s = pr.spec;
  Scaffold sc = scaffold(pr, s.m, "K");
  const AffineMatrix w0y = vstack(s.W * sc.out.YorK, s.H * sc.P);
  finish(sc, pr, s_condition(sc, pr, w0y));
  return std::move(sc.out);
}

SosSynthesis build_lsq(const SynthesisProblem& pr) {
  const auto& s = pr.spec;
  const auto& d = pr.data;
  const int n = s.n;
  const int T = d.T;
  std::vector<std::string> warnings;
  const int rank = numerical_rank(d.Wbar0, 1e-10);
  if (rank < d.Wbar0.rows()) {
    warnings.push_back("Wbar0 has rank " + std::to_string(rank) + " < " +
                       std::to_string(d.Wbar0.rows()) +
                       " rows; the least-squares model is not unique");
    log_info("lsq: {}", warnings.back());
  }
  const Eigen::MatrixXd wpinv = pseudo_inverse(d.Wbar0);
  const Eigen::MatrixXd s_star = d.X1 * wpinv;
  Scaffold sc = scaffold(pr, T, "Y");
  add_equality(sc, pr);
  const PolyMatrix w0 = vstack(s.W * d.U0, PolyMatrix::constant(d.Z0, n));
  const AffineMatrix tl = upsilon_block(sc, sc.dZhat * (s_star * w0), d.RD, n);
  const AffineMatrix bl = (wpinv * w0) * sc.out.YorK;
  const AffineMatrix br = identity_times(sc.out.eps2, T, n);
  finish(sc, pr, symmetric_blocks(tl, bl, br));
  sc.out.warnings.insert(sc.out.warnings.begin(), warnings.begin(), warnings.end());
  return std::move(sc.out);
}

SosSynthesis build(const SynthesisProblem& pr) {
  switch (pr.method) {
    case Method::kThm1: return build_thm1(pr);
    case Method::kRemark1: return build_remark1(pr);
    case Method::kThm2: return build_thm2(pr);
    case Method::kCor1: return build_cor1(pr);
    case Method::kLsq: return build_lsq(pr);
  }
  throw ConfigError("unknown method");
}

}  // namespace polystab
