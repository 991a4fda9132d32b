#include "polystab/experiment.h"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "polystab/integrate.h"
#include "polystab/matrix_io.h"

namespace polystab {

Eigen::VectorXd GroundTruth::rhs(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& u) const {
  return evaluate(f, x).col(0) + evaluate(g, x) * u;
}

void GroundTruth::check() const {
  if (f.cols() != 1) throw ConfigError("f must be a column vector");
  if (g.rows() != f.rows()) throw ConfigError("g must have n rows");
  if (f.nvars() != f.rows() || g.nvars() != f.rows()) {
    throw ConfigError("f and g must be polynomials in n = dim(x) variables");
  }
  const Eigen::MatrixXd f0 = evaluate(f, Eigen::VectorXd::Zero(n()));
  if (f0.cwiseAbs().maxCoeff() > 0.0) {
    throw ConfigError("f(0) != 0: the origin is not an equilibrium");
  }
}

LinearLikeForm linear_like_form(const GroundTruth& gt, const BasisSpec& spec) {
  const int n = gt.n();
  LinearLikeForm out{Eigen::MatrixXd::Zero(n, spec.N()),
                     Eigen::MatrixXd::Zero(n, spec.q())};
  std::map<Monomial, int> z_index;
  for (int j = 0; j < spec.N(); ++j) {
    z_index.emplace(spec.Z(j, 0).terms().begin()->first, j);
  }
  for (int i = 0; i < n; ++i) {
    for (const auto& [mono, c] : gt.f(i, 0).terms()) {
      auto it = z_index.find(mono);
      if (it == z_index.end()) {
        throw ConfigError("f contains monomial " + mono.to_string() +
                          " outside Z(x): basis too small");
      }
      out.A(i, it->second) = c;
    }
  }

  // Match g = B·W coefficientwise: for each (column k, monomial α),
  // Σⱼ B_ij·W_jk[α] = g_ik[α].
  std::vector<std::pair<int, Monomial>> keys;
  std::map<std::pair<int, Monomial>, int> key_index;
  auto key_of = [&](int k, const Monomial& mono) {
    auto [it, inserted] =
        key_index.try_emplace({k, mono}, static_cast<int>(keys.size()));
    if (inserted) keys.emplace_back(k, mono);
    return it->second;
  };
  for (int k = 0; k < spec.m; ++k) {
    for (int j = 0; j < spec.q(); ++j) {
      for (const auto& [mono, c] : spec.W(j, k).terms()) key_of(k, mono);
    }
    for (int i = 0; i < n; ++i) {
      for (const auto& [mono, c] : gt.g(i, k).terms()) key_of(k, mono);
    }
  }
  Eigen::MatrixXd Wc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keys.size()), spec.q());
  for (int k = 0; k < spec.m; ++k) {
    for (int j = 0; j < spec.q(); ++j) {
      for (const auto& [mono, c] : spec.W(j, k).terms()) Wc(key_of(k, mono), j) = c;
    }
  }
  Eigen::MatrixXd Gc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keys.size()), n);
  for (int k = 0; k < spec.m; ++k) {
    for (int i = 0; i < n; ++i) {
      for (const auto& [mono, c] : gt.g(i, k).terms()) Gc(key_of(k, mono), i) = c;
    }
  }
  const Eigen::MatrixXd Bt =
      Wc.completeOrthogonalDecomposition().solve(Gc);  // q×n
  if ((Wc * Bt - Gc).cwiseAbs().maxCoeff() > 1e-9) {
    throw ConfigError("g(x) is not expressible as B*W(x)");
  }
  out.B = Bt.transpose();
  return out;
}

InputSignal make_input_signal(const std::string& name, int m) {
  if (name == "sin") {
    return [m](double t) { return Eigen::VectorXd::Constant(m, std::sin(t)); };
  }
  if (name == "zero") {
    return [m](double) { return Eigen::VectorXd::Zero(m); };
  }
  if (name.rfind("const:", 0) == 0) {
    const double c = std::stod(name.substr(6));
    return [m, c](double) { return Eigen::VectorXd::Constant(m, c); };
  }
  throw ConfigError("unknown input signal '" + name + "'");
}

NoiseModel NoiseModel::parse(const std::string& text, std::uint64_t seed) {
  if (text == "none") return none();
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("bad noise model '" + text + "'");
  const std::string kind = text.substr(0, colon);
  const double level = std::stod(text.substr(colon + 1));
  if (level < 0.0) throw ConfigError("noise level must be non-negative");
  if (kind == "prop") return proportional(level);
  if (kind == "uniform") return uniform(level, seed);
  throw ConfigError("unknown noise model '" + kind + "'");
}

DataSet assemble_dataset(const BasisSpec& spec, const Eigen::MatrixXd& U0,
                         const Eigen::MatrixXd& X0, const Eigen::MatrixXd& X1,
                         double t0, double tau) {
  const auto T = X0.cols();
  if (U0.cols() != T || X1.cols() != T) throw ShapeError("sample counts differ");
  if (X0.rows() != spec.n || X1.rows() != spec.n) {
    throw ShapeError("state dimension differs from basis");
  }
  if (U0.rows() != spec.m) throw ShapeError("input dimension differs from basis");
  DataSet ds;
  ds.T = static_cast<int>(T);
  ds.tau = tau;
  ds.t0 = t0;
  ds.U0 = U0;
  ds.X0 = X0;
  ds.X1 = X1;
  ds.Z0.resize(spec.N(), T);
  ds.Ubar0.resize(spec.q(), T);
  for (Eigen::Index k = 0; k < T; ++k) {
    const Eigen::VectorXd x = X0.col(k);
    ds.Z0.col(k) = evaluate(spec.Z, x).col(0);
    ds.Ubar0.col(k) = evaluate(spec.W, x) * U0.col(k);
  }
  ds.Wbar0.resize(spec.q() + spec.N(), T);
  ds.Wbar0 << ds.Ubar0, ds.Z0;
  ds.RD = Eigen::MatrixXd::Zero(spec.n, T);
  return ds;
}

DataSet simulate_experiment(const GroundTruth& gt, const BasisSpec& spec,
                            const Eigen::VectorXd& x0, const InputSignal& input,
                            double t0, double tau, int T,
                            const NoiseModel& noise) {
  if (T < 1) throw ConfigError("T must be at least 1");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  gt.check();
  const int n = gt.n();
  const int m = gt.m();
  if (x0.size() != n) throw ShapeError("x0 has wrong length");

  Eigen::MatrixXd U0(m, T), X0(n, T), X1clean(n, T);
  auto rhs = [&](double t, const Eigen::VectorXd& x) {
    return gt.rhs(x, input(t));
  };
  constexpr int kSubsteps = 100;
  const double h = tau / kSubsteps;
  Eigen::VectorXd x = x0;
  for (int k = 0; k < T; ++k) {
    const double tk = t0 + k * tau;
    U0.col(k) = input(tk);
    X0.col(k) = x;
    X1clean.col(k) = gt.rhs(x, U0.col(k));
    if (k + 1 == T) break;
    for (int s = 0; s < kSubsteps; ++s) {
      x = rk4_step(rhs, tk + s * h, x, h);
      if (!x.allFinite() || x.norm() > kDivergenceNorm) {
        const double t_fail = tk + (s + 1) * h;
        throw DivergenceError(
            "experiment diverged at t = " + std::to_string(t_fail), t_fail);
      }
    }
  }

  Eigen::MatrixXd D0 = Eigen::MatrixXd::Zero(n, T);
  switch (noise.kind) {
    case NoiseModel::Kind::kNone:
      break;
    case NoiseModel::Kind::kProportional:
      D0 = noise.level * X1clean;
      break;
    case NoiseModel::Kind::kUniform: {
      std::mt19937_64 rng(noise.seed);
      std::uniform_real_distribution<double> dist(-noise.level, noise.level);
      for (int k = 0; k < T; ++k) {
        for (int i = 0; i < n; ++i) D0(i, k) = dist(rng);
      }
      break;
    }
  }
  DataSet ds = assemble_dataset(spec, U0, X0, X1clean + D0, t0, tau);
  ds.D0 = D0;
  return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

DataSet ingest(const std::string& path, const BasisSpec& spec) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open data file " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": empty file");
  const auto header = split_csv_line(line);
  std::map<std::string, int> col;
  for (size_t i = 0; i < header.size(); ++i) col[header[i]] = static_cast<int>(i);

  auto require = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw FormatError(path + ": missing column '" + name + "'");
    return it->second;
  };
  const int tcol = require("t");
  std::vector<int> ucols, xcols, dxcols;
  for (int i = 1; i <= spec.m; ++i) ucols.push_back(require("u" + std::to_string(i)));
  for (int i = 1; i <= spec.n; ++i) xcols.push_back(require("x" + std::to_string(i)));
  int ndx = 0;
  for (int i = 1; i <= spec.n; ++i) ndx += col.count("dx" + std::to_string(i));
  if (ndx != 0 && ndx != spec.n) {
    throw FormatError(path + ": derivative columns must be all present or all absent");
  }
  if (ndx) {
    for (int i = 1; i <= spec.n; ++i) dxcols.push_back(col["dx" + std::to_string(i)]);
  }

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(header.size()) + " fields");
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') {
        throw FormatError(path + ":" + std::to_string(lineno) +
                          ": not a number '" + c + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  const int T = static_cast<int>(rows.size());
  if (T < 1) throw FormatError(path + ": no samples");

  const double t0 = rows[0][tcol];
  double tau = T > 1 ? rows[1][tcol] - rows[0][tcol] : 1.0;
  if (T > 1 && !(tau > 0.0)) throw FormatError(path + ": time must increase");
  for (int k = 1; k < T; ++k) {
    const double dt = rows[k][tcol] - rows[k - 1][tcol];
    if (std::abs(dt - tau) / tau > 1e-6) {
      throw FormatError(path + ": non-uniform sampling at row " + std::to_string(k + 1));
    }
  }

  Eigen::MatrixXd U0(spec.m, T), X0(spec.n, T), X1(spec.n, T);
  for (int k = 0; k < T; ++k) {
    for (int i = 0; i < spec.m; ++i) U0(i, k) = rows[k][ucols[i]];
    for (int i = 0; i < spec.n; ++i) X0(i, k) = rows[k][xcols[i]];
    if (ndx) {
      for (int i = 0; i < spec.n; ++i) X1(i, k) = rows[k][dxcols[i]];
    }
  }
  if (!ndx) {
    if (T < 2) throw FormatError(path + ": need two samples to difference states");
    for (int k = 0; k < T; ++k) {
      if (k == 0) {
        X1.col(k) = (X0.col(1) - X0.col(0)) / tau;
      } else if (k == T - 1) {
        X1.col(k) = (X0.col(k) - X0.col(k - 1)) / tau;
      } else {
        X1.col(k) = (X0.col(k + 1) - X0.col(k - 1)) / (2.0 * tau);
      }
    }
  }
  return assemble_dataset(spec, U0, X0, X1, t0, tau);
}

std::string export_dataset(const DataSet& ds, const std::string& path) {
  std::ostringstream os;
  os << "t";
  for (int i = 1; i <= ds.m(); ++i) os << ",u" << i;
  for (int i = 1; i <= ds.n(); ++i) os << ",x" << i;
  for (int i = 1; i <= ds.n(); ++i) os << ",dx" << i;
  os << "\n";
  for (int k = 0; k < ds.T; ++k) {
    os << format_double(ds.t0 + k * ds.tau);
    for (int i = 0; i < ds.m(); ++i) os << "," << format_double(ds.U0(i, k));
    for (int i = 0; i < ds.n(); ++i) os << "," << format_double(ds.X0(i, k));
    for (int i = 0; i < ds.n(); ++i) os << "," << format_double(ds.X1(i, k));
    os << "\n";
  }
  write_text_file(path, os.str());

  nlohmann::json side = {{"T", ds.T}, {"tau", ds.tau}, {"t0", ds.t0},
                         {"RD", to_json(ds.RD)}};
  if (ds.RB) side["RB"] = to_json(*ds.RB);
  const std::string sidecar = path + ".bounds.json";
  write_text_file(sidecar, side.dump(2) + "\n");
  return sidecar;
}

void load_bounds(DataSet& ds, const std::string& sidecar_path) {
  const auto side = read_json_file(sidecar_path);
  if (!side.contains("RD")) throw FormatError(sidecar_path + ": missing RD");
  Eigen::MatrixXd rd = matrix_from_json(side["RD"]);
  if (rd.rows() != ds.n()) throw FormatError(sidecar_path + ": RD must have n rows");
  ds.RD = std::move(rd);
  if (side.contains("RB")) {
    Eigen::MatrixXd rb = matrix_from_json(side["RB"]);
    if (rb.rows() != ds.n()) throw FormatError(sidecar_path + ": RB must have n rows");
    ds.RB = std::move(rb);
  }
}

DataSet with_snr_bound(DataSet ds, double gamma) {
  if (!(gamma > 0.0)) throw ConfigError("noise bound gamma must be positive");
  ds.RD = gamma * ds.X1;
  return ds;
}

DataSet with_absolute_bound(DataSet ds, const Eigen::MatrixXd& rd) {
  if (rd.rows() != ds.n()) throw ShapeError("RD must have n rows");
  ds.RD = rd;
  return ds;
}

DataSet with_input_bound(DataSet ds, const Eigen::MatrixXd& rb) {
  if (rb.rows() != ds.n()) throw ShapeError("RB must have n rows");
  ds.RB = rb;
  return ds;
}

double noise_bound_violation(const Eigen::MatrixXd& d0, const Eigen::MatrixXd& rd) {
  const Eigen::MatrixXd gap = d0 * d0.transpose() - rd * rd.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gap, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

int numerical_rank(const Eigen::MatrixXd& m, double relative_cutoff) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > relative_cutoff * s(0)) ++rank;
  }
  return rank;
}

RichnessReport validate_richness(const DataSet& ds, const BasisSpec& spec) {
  RichnessReport r;
  r.T = ds.T;
  r.N = spec.N();
  r.rank_z0 = numerical_rank(ds.Z0, 1e-8);
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd x(spec.n);
  for (int i = 0; i < spec.n; ++i) x(i) = dist(rng);
  r.rank_h = numerical_rank(evaluate(spec.H, x), 1e-8);
  std::ostringstream os;
  os << "rank(Z0) = " << r.rank_z0 << ", rank(H) = " << r.rank_h << ", T = " << r.T
     << ", N = " << r.N;
  if (r.rank_z0 < r.rank_h) {
    r.warning = true;
    os << "; WARNING: rank(Z0) < rank(H), Z0*Y(x) = H(x)*P cannot hold";
  } else if (r.rank_z0 < r.N) {
    os << "; note: Z0 is not full row rank";
  }
  r.message = os.str();
  return r;
}

}  // namespace polystab
