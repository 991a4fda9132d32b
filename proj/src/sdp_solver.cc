#include "polystab/sdp_solver.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "polystab/errors.h"
#include "polystab/log.h"

namespace polystab {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
    case SolveStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kStepFraction = 0.98;
constexpr double kRankThreshold = 1e-10;
constexpr int kTraceTail = 10;

using SpMat = Eigen::SparseMatrix<double>;  // column major

struct Block {
  int size = 0;
  int dim = 0;
  int offset = 0;  // in the original decision vector
  SpMat A;         // m × dim, presolved rows
  Eigen::MatrixXd C;
};

struct Presolved {
  int m = 0;
  std::vector<int> rows;  // original index of each kept row
  Eigen::VectorXd row_scale;
  Eigen::VectorXd b;
  std::vector<Block> blocks;
  std::vector<int> free_idx;
  Eigen::MatrixXd Af;  // m × nf' after reparametrization
  Eigen::MatrixXd Vf;  // nf × nf'
  Eigen::VectorXd cf;
  int nu = 0;
  double c_norm = 0.0;
  bool infeasible = false;
  bool unbounded = false;
  std::string message;
};

Eigen::MatrixXd smat_block(const Eigen::VectorXd& v, int n) { return smat(v, n); }

/// svec(W S W) = H svec(S).
Eigen::MatrixXd scaling_operator(const Eigen::MatrixXd& W) {
  const int n = static_cast<int>(W.rows());
  const int d = svec_size(n);
  std::vector<std::pair<int, int>> ij(d);
  for (int j = 0; j < n; ++j) {
    for (int i = j; i < n; ++i) ij[svec_index(n, i, j)] = {i, j};
  }
  Eigen::MatrixXd H(d, d);
  for (int c = 0; c < d; ++c) {
    const auto [k, l] = ij[c];
    const double t = k == l ? 0.5 : 1.0 / kSqrt2;
    for (int r = 0; r < d; ++r) {
      const auto [i, j] = ij[r];
      const double s = i == j ? 1.0 : kSqrt2;
      H(r, c) = s * t * (W(i, k) * W(j, l) + W(i, l) * W(j, k));
    }
  }
  return H;
}

Presolved presolve(const SDPInstance& inst) {
  Presolved pre;
  const int m0 = inst.num_equalities();
  const Eigen::MatrixXd A0(inst.A);

  // Drop empty rows, scale the rest to unit norm.
  std::vector<int> nonzero;
  std::vector<double> scale;
  for (int i = 0; i < m0; ++i) {
    const double nrm = A0.row(i).norm();
    if (nrm == 0.0) {
      if (std::abs(inst.b(i)) > 0.0) {
        pre.infeasible = true;
        pre.message = "row " + std::to_string(i) + " reads 0 = " + std::to_string(inst.b(i));
        return pre;
      }
      continue;
    }
    nonzero.push_back(i);
    scale.push_back(1.0 / nrm);
  }
  Eigen::MatrixXd As(nonzero.size(), inst.num_vars);
  Eigen::VectorXd bs(nonzero.size());
  for (size_t k = 0; k < nonzero.size(); ++k) {
    As.row(k) = A0.row(nonzero[k]) * scale[k];
    bs(k) = inst.b(nonzero[k]) * scale[k];
  }

  // Keep a maximal independent set of rows.
  std::vector<int> keep;
  if (As.rows() > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(As.transpose());
    qr.setThreshold(kRankThreshold);
    const int rank = static_cast<int>(qr.rank());
    for (int k = 0; k < rank; ++k) keep.push_back(qr.colsPermutation().indices()(k));
    std::sort(keep.begin(), keep.end());
    if (rank < As.rows()) {
      Eigen::MatrixXd Ak(rank, inst.num_vars);
      Eigen::VectorXd bk(rank);
      for (int k = 0; k < rank; ++k) {
        Ak.row(k) = As.row(keep[k]);
        bk(k) = bs(keep[k]);
      }
      const Eigen::VectorXd x = Ak.colPivHouseholderQr().solve(bk);
      const double res = (As * x - bs).norm();
      if (res > 1e-8 * (1.0 + bs.norm())) {
        pre.infeasible = true;
        pre.message = "equality constraints are inconsistent (residual " +
                      std::to_string(res) + ")";
        return pre;
      }
    }
  }
  pre.m = static_cast<int>(keep.size());
  pre.rows.resize(pre.m);
  pre.row_scale.resize(pre.m);
  pre.b.resize(pre.m);
  Eigen::MatrixXd A(pre.m, inst.num_vars);
  for (int k = 0; k < pre.m; ++k) {
    pre.rows[k] = nonzero[keep[k]];
    pre.row_scale(k) = scale[keep[k]];
    pre.b(k) = bs(keep[k]);
    A.row(k) = As.row(keep[k]);
  }

  for (const auto& blk : inst.blocks) {
    Block b;
    b.size = blk.size;
    b.dim = svec_size(blk.size);
    b.offset = blk.offset;
    b.A = A.middleCols(blk.offset, b.dim).sparseView();
    b.C = smat(inst.c.segment(blk.offset, b.dim), blk.size);
    pre.nu += blk.size;
    pre.blocks.push_back(std::move(b));
  }

  pre.free_idx = inst.free_indices();
  const int nf = static_cast<int>(pre.free_idx.size());
  Eigen::MatrixXd Af(pre.m, nf);
  Eigen::VectorXd cf(nf);
  for (int k = 0; k < nf; ++k) {
    Af.col(k) = A.col(pre.free_idx[k]);
    cf(k) = inst.c(pre.free_idx[k]);
  }
  int rank = nf;
  if (nf > 0 && pre.m > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Af);
    qr.setThreshold(kRankThreshold);
    rank = static_cast<int>(qr.rank());
  } else if (pre.m == 0) {
    rank = 0;
  }
  if (rank == nf) {
    pre.Vf = Eigen::MatrixXd::Identity(nf, nf);
  } else {
    // Free directions invisible to the constraints are set to zero.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Af, Eigen::ComputeThinV);
    pre.Vf = svd.matrixV().leftCols(rank);
    const Eigen::VectorXd null_part = cf - pre.Vf * (pre.Vf.transpose() * cf);
    if (null_part.norm() > 1e-9 * (1.0 + cf.norm())) {
      pre.unbounded = true;
      pre.message = "objective decreases along an unconstrained free direction";
      return pre;
    }
  }
  pre.Af = Af * pre.Vf;
  pre.cf = pre.Vf.transpose() * cf;
  pre.c_norm = inst.c.norm();
  return pre;
}

struct Iterate {
  Eigen::VectorXd y;
  Eigen::VectorXd xf;
  std::vector<Eigen::MatrixXd> X;
  std::vector<Eigen::MatrixXd> Z;
  double tau = 1.0;
  double kappa = 1.0;
};

struct Residuals {
  Eigen::VectorXd rp;
  Eigen::VectorXd rdf;
  std::vector<Eigen::MatrixXd> rdg;
  double rg = 0.0;
};

struct Scaling {
  Eigen::MatrixXd R;
  Eigen::MatrixXd Rinv;
  Eigen::MatrixXd W;
  Eigen::VectorXd lambda;
};

struct Direction {
  Eigen::VectorXd dy;
  Eigen::VectorXd dxf;
  std::vector<Eigen::MatrixXd> dX;
  std::vector<Eigen::MatrixXd> dZ;
  double dtau = 0.0;
  double dkappa = 0.0;
};

Eigen::VectorXd apply_A(const Presolved& pre, const Eigen::VectorXd& xf,
                        const std::vector<Eigen::MatrixXd>& X) {
  Eigen::VectorXd out = pre.Af * xf;
  for (size_t j = 0; j < pre.blocks.size(); ++j) out += pre.blocks[j].A * svec(X[j]);
  return out;
}

Eigen::MatrixXd apply_At(const Block& blk, const Eigen::VectorXd& y) {
  return smat_block(blk.A.transpose() * y, blk.size);
}

double inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.cwiseProduct(b).sum();
}

double primal_objective(const Presolved& pre, const Iterate& it) {
  double out = pre.cf.dot(it.xf);
  for (size_t j = 0; j < pre.blocks.size(); ++j) out += inner(pre.blocks[j].C, it.X[j]);
  return out;
}

Residuals residuals(const Presolved& pre, const Iterate& it) {
  Residuals r;
  r.rp = apply_A(pre, it.xf, it.X) - pre.b * it.tau;
  r.rdf = pre.Af.transpose() * it.y - pre.cf * it.tau;
  for (size_t j = 0; j < pre.blocks.size(); ++j) {
    const auto& blk = pre.blocks[j];
    r.rdg.push_back(apply_At(blk, it.y) + it.Z[j] - blk.C * it.tau);
  }
  r.rg = primal_objective(pre, it) - pre.b.dot(it.y) + it.kappa;
  return r;
}

bool nt_scaling(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, Scaling& s) {
  Eigen::LLT<Eigen::MatrixXd> lx(X), lz(Z);
  if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
  const Eigen::MatrixXd LX = lx.matrixL();
  const Eigen::MatrixXd LZ = lz.matrixL();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(LZ.transpose() * LX,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  s.lambda = svd.singularValues();
  if (s.lambda.minCoeff() <= 0.0) return false;
  const Eigen::VectorXd isq = s.lambda.cwiseSqrt().cwiseInverse();
  s.R = LX * svd.matrixV() * isq.asDiagonal();
  s.Rinv = isq.asDiagonal() * svd.matrixU().transpose() * LZ.transpose();
  s.W = s.R * s.R.transpose();
  return true;
}

/// Largest α ≤ 1/0 such that Λ + α·D stays PSD, for scaled D.
double max_step(const Eigen::VectorXd& lambda, const Eigen::MatrixXd& d) {
  const Eigen::VectorXd isq = lambda.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd t = isq.asDiagonal() * d * isq.asDiagonal();
  t = 0.5 * (t + t.transpose());
  const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t, Eigen::EigenvaluesOnly)
                          .eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

class Kkt {
 public:
  Kkt(const Presolved& pre, const std::vector<Scaling>& scal) : pre_(pre) {
    const int m = pre.m;
    const int nf = static_cast<int>(pre.Af.cols());
    size_ = m + nf;
    K_ = Eigen::MatrixXd::Zero(size_, size_);
    for (size_t j = 0; j < pre.blocks.size(); ++j) {
      const Eigen::MatrixXd H = scaling_operator(scal[j].W);
      const Eigen::MatrixXd T = pre.blocks[j].A * H;
      K_.topLeftCorner(m, m).noalias() += T * pre.blocks[j].A.transpose();
    }
    K_.topRightCorner(m, nf) = pre.Af;
    K_.bottomLeftCorner(nf, m) = pre.Af.transpose();
    if (size_ > 0) lu_.compute(K_);
  }

  void solve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dy,
             Eigen::VectorXd& dxf) const {
    const int m = pre_.m;
    if (size_ == 0) {
      dy.resize(0);
      dxf.resize(0);
      return;
    }
    Eigen::VectorXd rhs(size_);
    rhs << r1, r2;
    Eigen::VectorXd sol = lu_.solve(rhs);
    sol += lu_.solve(rhs - K_ * sol);
    dy = sol.head(m);
    dxf = sol.tail(size_ - m);
  }

 private:
  const Presolved& pre_;
  int size_ = 0;
  Eigen::MatrixXd K_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Solves the linearized embedding for residual weight eta, scaled
/// complementarity targets u (one per block) and τκ target dtau_rhs.
Direction direction(const Presolved& pre, const Iterate& it, const Residuals& res,
                    const std::vector<Scaling>& scal, const Kkt& kkt,
                    const Eigen::VectorXd& qy, const Eigen::VectorXd& qf,
                    const std::vector<Eigen::MatrixXd>& q_blocks, double alpha1, double eta,
                    const std::vector<Eigen::MatrixXd>& u, double dtau_rhs) {
  const size_t nb = pre.blocks.size();
  std::vector<Eigen::MatrixXd> Dx(nb);
  Eigen::VectorXd h1 = -eta * res.rp;
  for (size_t j = 0; j < nb; ++j) {
    const auto& s = scal[j];
    Dx[j] = s.R * u[j] * s.R.transpose();
    const Eigen::MatrixXd t = Dx[j] + eta * s.W * res.rdg[j] * s.W;
    h1 -= pre.blocks[j].A * svec(t);
  }
  const Eigen::VectorXd h2 = -eta * res.rdf;
  Eigen::VectorXd py, pf;
  kkt.solve(h1, h2, py, pf);

  double alpha0 = pre.cf.dot(pf) - pre.b.dot(py);
  std::vector<Eigen::MatrixXd> p_blocks(nb);
  for (size_t j = 0; j < nb; ++j) {
    const auto& s = scal[j];
    p_blocks[j] = Dx[j] + s.W * (eta * res.rdg[j] + apply_At(pre.blocks[j], py)) * s.W;
    alpha0 += inner(pre.blocks[j].C, p_blocks[j]);
  }

  Direction d;
  d.dtau = (-eta * res.rg - alpha0 - dtau_rhs / it.tau) / (alpha1 - it.kappa / it.tau);
  d.dy = py + d.dtau * qy;
  d.dxf = pf + d.dtau * qf;
  d.dX.resize(nb);
  d.dZ.resize(nb);
  for (size_t j = 0; j < nb; ++j) {
    const auto& s = scal[j];
    d.dX[j] = p_blocks[j] + d.dtau * q_blocks[j];
    const Eigen::MatrixXd S =
        eta * res.rdg[j] + apply_At(pre.blocks[j], d.dy) - d.dtau * pre.blocks[j].C;
    d.dZ[j] = -S;
    (void)s;
  }
  d.dkappa = (dtau_rhs - it.kappa * d.dtau) / it.tau;
  return d;
}

double step_length(const Iterate& it, const Direction& d, const std::vector<Scaling>& scal) {
  double alpha = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < scal.size(); ++j) {
    const auto& s = scal[j];
    alpha = std::min(alpha, max_step(s.lambda, s.Rinv * d.dX[j] * s.Rinv.transpose()));
    alpha = std::min(alpha, max_step(s.lambda, s.R.transpose() * d.dZ[j] * s.R));
  }
  if (d.dtau < 0.0) alpha = std::min(alpha, -it.tau / d.dtau);
  if (d.dkappa < 0.0) alpha = std::min(alpha, -it.kappa / d.dkappa);
  return alpha;
}

bool finite(const Direction& d) {
  if (!std::isfinite(d.dtau) || !std::isfinite(d.dkappa)) return false;
  if (!d.dy.allFinite() || !d.dxf.allFinite()) return false;
  for (const auto& m : d.dX) {
    if (!m.allFinite()) return false;
  }
  for (const auto& m : d.dZ) {
    if (!m.allFinite()) return false;
  }
  return true;
}

Eigen::VectorXd assemble_primal(const SDPInstance& inst, const Presolved& pre,
                                const Iterate& it, double tau) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(inst.num_vars);
  const Eigen::VectorXd xf = pre.Vf * it.xf;
  for (size_t k = 0; k < pre.free_idx.size(); ++k) v(pre.free_idx[k]) = xf(k) / tau;
  for (size_t j = 0; j < pre.blocks.size(); ++j) {
    v.segment(pre.blocks[j].offset, pre.blocks[j].dim) = svec(it.X[j]) / tau;
  }
  return v;
}

Eigen::VectorXd assemble_dual(const SDPInstance& inst, const Presolved& pre,
                              const Iterate& it, double tau) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(inst.num_equalities());
  for (int k = 0; k < pre.m; ++k) y(pre.rows[k]) = it.y(k) * pre.row_scale(k) / tau;
  return y;
}

}  // namespace

SolveReport solve(const SDPInstance& inst, const SolveOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  inst.validate();
  SolveReport report;

  const Presolved pre = presolve(inst);
  if (pre.infeasible || pre.unbounded) {
    report.status = pre.infeasible ? SolveStatus::kInfeasible : SolveStatus::kNumericalFailure;
    report.message = pre.message;
    report.wall_time = elapsed();
    return report;
  }

  const size_t nb = pre.blocks.size();
  Iterate it;
  it.y = Eigen::VectorXd::Zero(pre.m);
  it.xf = Eigen::VectorXd::Zero(pre.Af.cols());
  for (const auto& blk : pre.blocks) {
    it.X.push_back(Eigen::MatrixXd::Identity(blk.size, blk.size));
    it.Z.push_back(Eigen::MatrixXd::Identity(blk.size, blk.size));
  }
  const double b_norm = inst.b.norm();
  const double bs_norm = pre.b.norm();
  const bool has_objective = pre.c_norm > 0.0;
  std::deque<IterationRecord> tail;
  int tiny_steps = 0;
  // Most accurate iterate so far, used when the iteration breaks down.
  double best_err = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_v, best_y;
  double best_pres = 0.0, best_dres = 0.0, best_gap = 0.0;

  for (int iter = 0;; ++iter) {
    report.iterations = iter;
    const Residuals res = residuals(pre, it);

    // Convergence metrics on the de-homogenized point.
    const Eigen::VectorXd v = assemble_primal(inst, pre, it, it.tau);
    const double pres = (inst.A * v - inst.b).norm() / (1.0 + b_norm);
    double dres2 = res.rdf.squaredNorm();
    double compl_xz = 0.0;
    for (size_t j = 0; j < nb; ++j) {
      dres2 += res.rdg[j].squaredNorm();
      compl_xz += inner(it.X[j], it.Z[j]);
    }
    const double dres = std::sqrt(dres2) / it.tau / (1.0 + pre.c_norm);
    const double pobj = primal_objective(pre, it) / it.tau;
    const double dobj = pre.b.dot(it.y) / it.tau;
    const double gap = std::max(std::abs(pobj - dobj), compl_xz / (it.tau * it.tau)) /
                       (1.0 + std::abs(pobj) + std::abs(dobj));
    const double mu = (compl_xz + it.tau * it.kappa) / (pre.nu + 1);

    IterationRecord rec{iter, pres, dres, gap, mu, it.tau, it.kappa, 0.0};
    tail.push_back(rec);
    if (static_cast<int>(tail.size()) > kTraceTail) tail.pop_front();
    log_debug("ipm {:3d} pres {:.2e} dres {:.2e} gap {:.2e} mu {:.2e} tau {:.2e} kappa {:.2e}",
              iter, pres, dres, gap, mu, it.tau, it.kappa);

    report.primal_residual = pres;
    report.dual_residual = dres;
    report.gap = gap;
    if (pres <= opts.tol_feas && dres <= opts.tol_feas && gap <= opts.tol_feas) {
      report.status = has_objective ? SolveStatus::kOptimal : SolveStatus::kFeasible;
      report.v = v;
      report.y = assemble_dual(inst, pre, it, it.tau);
      break;
    }
    if (const double err = std::max({pres, dres, gap}); err < best_err) {
      best_err = err;
      best_v = v;
      best_y = assemble_dual(inst, pre, it, it.tau);
      best_pres = pres;
      best_dres = dres;
      best_gap = gap;
    }

    // Improving ray: bᵀy > 0 with A_fᵀy ≈ 0 and A_gᵀy ⪯ 0.
    const double by = pre.b.dot(it.y);
    if (by > 0.0) {
      double ray2 = (pre.Af.transpose() * it.y).squaredNorm();
      for (size_t j = 0; j < nb; ++j) {
        ray2 += (apply_At(pre.blocks[j], it.y) + it.Z[j]).squaredNorm();
      }
      if (std::sqrt(ray2) <= opts.tol_infeas * by && it.tau < it.kappa) {
        report.status = SolveStatus::kInfeasible;
        report.message = "primal infeasibility certificate found";
        report.y = assemble_dual(inst, pre, it, by);
        break;
      }
    }
    const double cx = primal_objective(pre, it);
    if (cx < 0.0 && res.rp.norm() + pre.b.norm() * it.tau <= opts.tol_feas * -cx &&
        it.tau < 1e-6 * it.kappa) {
      report.status = SolveStatus::kNumericalFailure;
      report.message = "dual infeasible: objective unbounded below";
      break;
    }
    if (iter >= opts.max_iter) {
      report.status = SolveStatus::kIterationLimit;
      report.message = "iteration limit reached";
      break;
    }

    std::vector<Scaling> scal(nb);
    bool ok = true;
    for (size_t j = 0; j < nb && ok; ++j) ok = nt_scaling(it.X[j], it.Z[j], scal[j]);
    if (!ok) {
      report.status = SolveStatus::kNumericalFailure;
      report.message = "iterate left the cone interior";
      break;
    }
    const Kkt kkt(pre, scal);

    // Direction component proportional to Δτ.
    Eigen::VectorXd g1 = pre.b;
    for (size_t j = 0; j < nb; ++j) {
      g1 += pre.blocks[j].A * svec(scal[j].W * pre.blocks[j].C * scal[j].W);
    }
    Eigen::VectorXd qy, qf;
    kkt.solve(g1, pre.cf, qy, qf);
    double alpha1 = pre.cf.dot(qf) - pre.b.dot(qy);
    std::vector<Eigen::MatrixXd> q_blocks(nb);
    for (size_t j = 0; j < nb; ++j) {
      q_blocks[j] = scal[j].W * (apply_At(pre.blocks[j], qy) - pre.blocks[j].C) * scal[j].W;
      alpha1 += inner(pre.blocks[j].C, q_blocks[j]);
    }

    // Predictor.
    std::vector<Eigen::MatrixXd> u(nb);
    for (size_t j = 0; j < nb; ++j) u[j] = -Eigen::MatrixXd(scal[j].lambda.asDiagonal());
    const Direction da = direction(pre, it, res, scal, kkt, qy, qf, q_blocks, alpha1, 1.0, u,
                                   -it.tau * it.kappa);
    if (!finite(da)) {
      report.status = SolveStatus::kNumericalFailure;
      report.message = "non-finite predictor direction";
      break;
    }
    const double alpha_a = std::min(1.0, step_length(it, da, scal));
    const double sigma = std::clamp(std::pow(1.0 - alpha_a, 3), 0.0, 1.0);

    // Corrector.
    for (size_t j = 0; j < nb; ++j) {
      const auto& s = scal[j];
      const Eigen::MatrixXd dxs = s.Rinv * da.dX[j] * s.Rinv.transpose();
      const Eigen::MatrixXd dzs = s.R.transpose() * da.dZ[j] * s.R;
      Eigen::MatrixXd rhs = -0.5 * (dxs * dzs + dzs * dxs);
      for (int i = 0; i < rhs.rows(); ++i) rhs(i, i) += sigma * mu - s.lambda(i) * s.lambda(i);
      for (int i = 0; i < rhs.rows(); ++i) {
        for (int k = 0; k < rhs.cols(); ++k) {
          rhs(i, k) *= 2.0 / (s.lambda(i) + s.lambda(k));
        }
      }
      u[j] = rhs;
    }
    const double dtau_rhs = sigma * mu - it.tau * it.kappa - da.dtau * da.dkappa;
    const Direction d = direction(pre, it, res, scal, kkt, qy, qf, q_blocks, alpha1,
                                  1.0 - sigma, u, dtau_rhs);
    if (!finite(d)) {
      report.status = SolveStatus::kNumericalFailure;
      report.message = "non-finite corrector direction";
      break;
    }
    const double alpha = std::min(1.0, kStepFraction * step_length(it, d, scal));
    tail.back().step = alpha;
    if (alpha < 1e-10) {
      if (++tiny_steps >= 3) {
        report.status = SolveStatus::kNumericalFailure;
        report.message = "step length collapsed";
        break;
      }
    } else {
      tiny_steps = 0;
    }

    it.y += alpha * d.dy;
    it.xf += alpha * d.dxf;
    for (size_t j = 0; j < nb; ++j) {
      it.X[j] += alpha * d.dX[j];
      it.Z[j] += alpha * d.dZ[j];
      it.X[j] = 0.5 * (it.X[j] + it.X[j].transpose());
      it.Z[j] = 0.5 * (it.Z[j] + it.Z[j].transpose());
    }
    it.tau += alpha * d.dtau;
    it.kappa += alpha * d.dkappa;
    (void)bs_norm;
  }

  const bool broke_down = report.status == SolveStatus::kNumericalFailure ||
                          report.status == SolveStatus::kIterationLimit;
  if (broke_down && best_err <= opts.tol_reduced) {
    report.message = "reduced accuracy (" + report.message + ")";
    report.status = has_objective ? SolveStatus::kOptimal : SolveStatus::kFeasible;
    report.v = best_v;
    report.y = best_y;
    report.primal_residual = best_pres;
    report.dual_residual = best_dres;
    report.gap = best_gap;
  }
  report.trace_tail.assign(tail.begin(), tail.end());
  report.wall_time = elapsed();
  log_info("solve: {} after {} iterations, pres {:.2e} dres {:.2e} gap {:.2e}, {:.3f}s",
           to_string(report.status), report.iterations, report.primal_residual,
           report.dual_residual, report.gap, report.wall_time);
  return report;
}

std::vector<std::string> SolutionCheck::violations(const SDPInstance& inst, double eig_tol,
                                                   double residual_tol) const {
  std::vector<std::string> out;
  for (size_t k = 0; k < block_min_eigenvalue.size(); ++k) {
    if (block_min_eigenvalue[k] < -eig_tol) {
      out.push_back("block '" + inst.blocks[k].name + "' has eigenvalue " +
                    std::to_string(block_min_eigenvalue[k]));
    }
  }
  for (Eigen::Index i = 0; i < row_residual.size(); ++i) {
    if (std::abs(row_residual(i)) > residual_tol) {
      std::string where;
      for (const auto& rr : inst.rows) {
        if (i >= rr.first && i < rr.first + rr.count) where = " (" + rr.name + ")";
      }
      out.push_back("row " + std::to_string(i) + where + " residual " +
                    std::to_string(row_residual(i)));
    }
  }
  return out;
}

SolutionCheck check_solution(const SDPInstance& inst,
                             const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != inst.num_vars) throw ShapeError("decision vector has wrong length");
  SolutionCheck out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < inst.blocks.size(); ++k) {
    const Eigen::MatrixXd m = inst.block_matrix(static_cast<int>(k), v);
    const double lmin =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
    out.block_min_eigenvalue.push_back(lmin);
    if (lmin < out.min_eigenvalue) {
      out.min_eigenvalue = lmin;
      out.worst_block = static_cast<int>(k);
    }
  }
  if (inst.blocks.empty()) out.min_eigenvalue = 0.0;
  out.row_residual = inst.A * v - inst.b;
  if (out.row_residual.size() > 0) {
    Eigen::Index worst = 0;
    out.max_residual = out.row_residual.cwiseAbs().maxCoeff(&worst);
    out.worst_row = static_cast<int>(worst);
  }
  return out;
}

}  // namespace polystab
