#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "polystab/errors.h"
#include "polystab/log.h"
#include "polystab/matrix_io.h"
#include "polystab/pipeline.h"
#include "polystab/systems.h"

namespace fs = std::filesystem;
using namespace polystab;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      size_t used = 0;
      vals.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + cell + "' in '" + text + "'");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

// "deg:a-b" or "deg:k".
std::pair<int, int> parse_degrees(const std::string& text) {
  if (text.rfind("deg:", 0) != 0) throw ConfigError("expected deg:<a>-<b>, got '" + text + "'");
  const std::string body = text.substr(4);
  try {
    const auto dash = body.find('-');
    if (dash == std::string::npos) return {std::stoi(body), std::stoi(body)};
    return {std::stoi(body.substr(0, dash)), std::stoi(body.substr(dash + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad degree range '" + text + "'");
  }
}

double parse_prefixed(const std::string& text, const std::string& prefix) {
  try {
    return std::stod(text.substr(prefix.size()));
  } catch (const std::exception&) {
    throw ConfigError("bad value in '" + text + "'");
  }
}

DataSet apply_bound(DataSet ds, const std::string& bound) {
  if (bound.rfind("snr:", 0) == 0) return with_snr_bound(std::move(ds), parse_prefixed(bound, "snr:"));
  if (bound.rfind("abs:", 0) == 0) {
    const double d = parse_prefixed(bound, "abs:");
    return with_absolute_bound(std::move(ds), d * Eigen::MatrixXd::Identity(ds.n(), ds.n()));
  }
  if (bound == "none") return with_absolute_bound(std::move(ds), Eigen::MatrixXd::Zero(ds.n(), 1));
  throw ConfigError("--bound expects snr:<gamma>, abs:<delta> or none, got '" + bound + "'");
}

DataSet apply_rb(DataSet ds, int q, double rb) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ds.n(), q);
  for (int i = 0; i < std::min(ds.n(), q); ++i) m(i, i) = rb;
  return with_input_bound(std::move(ds), m);
}

BasisSpec make_spec(int n, int m, const std::string& basis, const std::string& zhat) {
  const auto [zmin, zmax] = parse_degrees(basis);
  const auto [hmin, hmax] = parse_degrees(zhat);
  if (hmin != hmax && hmin != 1) throw ConfigError("--zhat must be deg:<k> or deg:1-<k>");
  return BasisSpec::from_degrees(n, m, zmin, zmax, hmax);
}

// n and m from a data CSV header.
std::pair<int, int> csv_dimensions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open data file " + path);
  std::string header;
  std::getline(in, header);
  int n = 0;
  int m = 0;
  std::stringstream ss(header);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    if (cell.size() > 1 && cell[0] == 'x') ++n;
    if (cell.size() > 1 && cell[0] == 'u') ++m;
  }
  if (n == 0 || m == 0) throw FormatError(path + ": header needs x1.. and u1.. columns");
  return {n, m};
}

std::string stem_of(const std::string& path) {
  std::string s = fs::path(path).filename().string();
  for (const char* ext : {".cert.json", ".json", ".csv"}) {
    const std::string e(ext);
    if (s.size() > e.size() && s.compare(s.size() - e.size(), e.size(), e) == 0) {
      return s.substr(0, s.size() - e.size());
    }
  }
  return s;
}

void announce(const std::string& path) { std::cout << "wrote " << path << "\n"; }

struct SimulateArgs {
  std::string system = "vanderpol";
  std::string x0;
  std::string input = "sin";
  double t0 = 0.0;
  double tau = 0.5;
  int T = 12;
  std::string noise = "none";
  std::string bound;
  double rb = 0.0;
  std::uint64_t seed = 0;
  std::string basis;
  std::string zhat = "deg:1";
  std::string output = "data.csv";
};

int cmd_simulate(const SimulateArgs& a) {
  const GroundTruth gt = builtin_system(a.system);
  const BasisSpec spec =
      a.basis.empty() ? default_basis(a.system) : make_spec(gt.n(), gt.m(), a.basis, a.zhat);
  Eigen::VectorXd x0 = a.x0.empty() ? Eigen::VectorXd::Zero(gt.n()) : parse_vector(a.x0);
  if (x0.size() != gt.n()) throw ConfigError(fmt::format("--x0 needs {} entries", gt.n()));
  DataSet ds = simulate_experiment(gt, spec, x0, make_input_signal(a.input, gt.m()), a.t0,
                                   a.tau, a.T, NoiseModel::parse(a.noise, a.seed));
  if (!a.bound.empty()) ds = apply_bound(std::move(ds), a.bound);
  if (a.rb > 0.0) ds = apply_rb(std::move(ds), spec.q(), a.rb);
  const RichnessReport rich = validate_richness(ds, spec);
  std::cout << rich.message << "\n";
  if (ds.D0 && ds.RD.size() > 0 && ds.RD.norm() > 0.0) {
    const double viol = noise_bound_violation(*ds.D0, ds.RD);
    std::cout << fmt::format("noise bound: lambda_max(D0 D0' - RD RD') = {:.3e}{}\n", viol,
                             viol > 1e-9 ? " (bound violated)" : "");
  }
  if (!fs::path(a.output).parent_path().empty()) {
    fs::create_directories(fs::path(a.output).parent_path());
  }
  const std::string sidecar = export_dataset(ds, a.output);
  announce(a.output);
  announce(sidecar);
  return 0;
}

struct SynthesizeArgs {
  std::string data;
  std::string bounds;
  std::string basis = "deg:1-1";
  std::string zhat = "deg:1";
  std::string method = "cor1";
  std::string bound;
  double rb = 0.0;
  std::string system;
  SynthesisOptions opts;
  SolveOptions solve;
  VerifyOptions verify;
  bool parallel = false;
  std::string out_dir = ".";
};

std::vector<Method> parse_methods(const std::string& text) {
  if (text == "all") {
    return {Method::kThm1, Method::kRemark1, Method::kThm2, Method::kCor1, Method::kLsq};
  }
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_method(cell));
  if (out.empty()) throw ConfigError("no method given");
  return out;
}

int cmd_synthesize(const SynthesizeArgs& a) {
  const auto [n, m] = csv_dimensions(a.data);
  const BasisSpec spec = make_spec(n, m, a.basis, a.zhat);
  DataSet ds = ingest(a.data, spec);
  const std::string sidecar = a.bounds.empty() ? a.data + ".bounds.json" : a.bounds;
  if (fs::exists(sidecar)) {
    load_bounds(ds, sidecar);
  } else if (a.bound.empty()) {
    throw ConfigError("no noise bound: pass --bound or provide " + sidecar);
  }
  if (!a.bound.empty()) ds = apply_bound(std::move(ds), a.bound);
  if (a.rb > 0.0) ds = apply_rb(std::move(ds), spec.q(), a.rb);
  std::cout << validate_richness(ds, spec).message << "\n";

  std::optional<GroundTruth> gt;
  if (!a.system.empty()) gt = builtin_system(a.system);

  std::vector<Method> methods = parse_methods(a.method);
  if (a.method == "all" && !ds.RB) {
    // THM1 needs an input-matrix bound; skip it rather than fail the batch.
    methods.erase(methods.begin());
    std::cout << "thm1 skipped: no --rb bound\n";
  }
  std::vector<SynthesisProblem> problems;
  for (Method method : methods) {
    problems.push_back({method, spec, ds, a.opts});
    check_options(problems.back());
  }

  std::vector<MethodOutcome> outcomes;
  auto run = [&](const SynthesisProblem& p) {
    return run_method(p, a.solve, gt ? &*gt : nullptr, a.verify);
  };
  if (a.parallel) {
    std::vector<std::future<MethodOutcome>> jobs;
    for (const auto& p : problems) jobs.push_back(std::async(std::launch::async, run, p));
    for (auto& j : jobs) outcomes.push_back(j.get());
  } else {
    for (const auto& p : problems) outcomes.push_back(run(p));
  }

  fs::create_directories(a.out_dir);
  const std::string stem = stem_of(a.data);
  std::vector<MethodRow> rows;
  bool ok = true;
  for (const auto& o : outcomes) {
    rows.push_back(o.row());
    for (const auto& w : o.warnings) std::cout << to_string(o.method) << ": " << w << "\n";
    if (!o.certificate) {
      ok = false;
      std::cout << fmt::format("{}: {} ({}); no certificate written\n", to_string(o.method),
                               o.status, o.message);
      for (const auto& it : o.report.trace_tail) {
        std::cout << fmt::format("  it {:3d} pres {:.2e} dres {:.2e} gap {:.2e} mu {:.2e}\n",
                                 it.iteration, it.primal_residual, it.dual_residual, it.gap,
                                 it.mu);
      }
      continue;
    }
    if (!o.success()) ok = false;
    for (const auto& v : o.certificate->violations) {
      std::cout << to_string(o.method) << ": violation: " << v << "\n";
    }
    const std::string path =
        (fs::path(a.out_dir) / (stem + "." + to_string(o.method) + ".cert.json")).string();
    write_text_file(path, dump_certificate(*o.certificate));
    announce(path);
  }
  const ComparisonReport report = make_report(rows);
  const std::string table = report.table();
  std::cout << table;
  const std::string report_path = (fs::path(a.out_dir) / (stem + ".report.txt")).string();
  write_text_file(report_path, table);
  announce(report_path);
  return ok ? 0 : kExitFailure;
}

struct VerifyArgs {
  std::string certificate;
  std::string system = "vanderpol";
  std::vector<std::string> x0;
  VerifyOptions opts;
  std::string out_dir = ".";
};

int cmd_verify(const VerifyArgs& a) {
  const Certificate cert = certificate_from_json(read_json_file(a.certificate));
  const GroundTruth gt = builtin_system(a.system);
  VerifyOptions opts = a.opts;
  for (const auto& s : a.x0) opts.x0.push_back(parse_vector(s));
  const Verification v = verify_certificate(cert, gt, opts);
  std::cout << fmt::format(
      "audit: {} of {} samples with Vdot < 0 in [-{}, {}]^{}, max Vdot {:.3e}, max "
      "Vdot/|Zhat|^2 {:.3e}: {}\n",
      v.audit.negative, v.audit.samples, opts.audit.box, opts.audit.box, cert.n,
      v.audit.max_vdot, v.audit.max_normalized_vdot, v.audit.passed ? "pass" : "FAIL");
  fs::create_directories(a.out_dir);
  const std::string stem = stem_of(a.certificate);
  for (size_t k = 0; k < v.trajectories.size(); ++k) {
    const auto& tr = v.trajectories[k];
    std::cout << fmt::format("x0 = [{}]: ", fmt::join(std::vector<double>(v.x0[k].data(),
                                                                           v.x0[k].data() + cert.n),
                                                       ", "));
    if (tr.diverged) {
      std::cout << fmt::format("diverged at t = {:.3f}\n", tr.escape_time);
    } else {
      std::cout << fmt::format("|x(t_end)| = {:.3e}\n", tr.final_norm());
    }
    const std::string path = (fs::path(a.out_dir) / fmt::format("{}.traj{}.csv", stem, k)).string();
    write_text_file(path, trajectory_csv(tr));
    announce(path);
  }
  std::cout << fmt::format("{} of {} trajectories converged\n", v.converged,
                           v.trajectories.size());
  return v.passed() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-driven polynomial state-feedback synthesis"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style file mirroring the flags; flags override it");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run an experiment on a built-in system");
  simulate->add_option("--system", sim.system, "vanderpol, linear1d, scalar-cubic, integrator");
  simulate->add_option("--x0", sim.x0, "initial state, comma separated");
  simulate->add_option("--input", sim.input, "sin, zero or const:<c>");
  simulate->add_option("--t0", sim.t0);
  simulate->add_option("--tau", sim.tau, "sampling period");
  simulate->add_option("--T", sim.T, "number of samples");
  simulate->add_option("--noise", sim.noise, "none, prop:<gamma> or uniform:<delta>");
  simulate->add_option("--bound", sim.bound, "snr:<gamma>, abs:<delta> or none");
  simulate->add_option("--rb", sim.rb, "input-matrix bound RB = rb*I");
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--basis", sim.basis, "Z degrees, deg:<a>-<b>");
  simulate->add_option("--zhat", sim.zhat, "Zhat degrees, deg:<k>");
  simulate->add_option("-o,--output", sim.output);

  SynthesizeArgs syn;
  auto* synthesize = app.add_subcommand("synthesize", "Solve the SOS conditions on a data file");
  synthesize->add_option("data", syn.data, "data CSV")->required();
  synthesize->add_option("--bounds", syn.bounds, "bound sidecar (default <data>.bounds.json)");
  synthesize->add_option("--basis", syn.basis, "Z degrees, deg:<a>-<b>");
  synthesize->add_option("--zhat", syn.zhat, "Zhat degrees, deg:<k>");
  synthesize->add_option("--method", syn.method, "thm1|remark1|thm2|cor1|lsq|all or a list");
  synthesize->add_option("--bound", syn.bound, "overrides the sidecar noise bound");
  synthesize->add_option("--rb", syn.rb, "input-matrix bound RB = rb*I");
  synthesize->add_option("--system", syn.system, "built-in ground truth for verification");
  synthesize->add_option("--deg-y", syn.opts.deg_y);
  synthesize->add_option("--deg-eps1", syn.opts.deg_eps1);
  synthesize->add_option("--deg-eps2", syn.opts.deg_eps2);
  synthesize->add_option("--rho", syn.opts.rho);
  synthesize->add_option("--delta", syn.opts.delta);
  synthesize->add_flag("--trace-objective", syn.opts.trace_objective);
  synthesize->add_option("--tol", syn.solve.tol_feas);
  synthesize->add_option("--max-iter", syn.solve.max_iter);
  synthesize->add_option("--seed", syn.solve.seed);
  synthesize->add_option("--box", syn.verify.audit.box);
  synthesize->add_option("--samples", syn.verify.audit.samples);
  synthesize->add_option("--t-end", syn.verify.t_end);
  synthesize->add_flag("--parallel", syn.parallel, "solve methods concurrently");
  synthesize->add_option("--out-dir", syn.out_dir);

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Audit a certificate and simulate the closed loop");
  verify->add_option("certificate", ver.certificate)->required();
  verify->add_option("--system", ver.system);
  verify->add_option("--x0", ver.x0, "initial state (repeatable); default ring on the box");
  verify->add_option("--box", ver.opts.audit.box);
  verify->add_option("--samples", ver.opts.audit.samples);
  verify->add_option("--t-end", ver.opts.t_end);
  verify->add_option("--dt", ver.opts.dt);
  verify->add_option("--converge-tol", ver.opts.converge_tol);
  verify->add_option("--out-dir", ver.out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) return cmd_simulate(sim);
    if (*synthesize) return cmd_synthesize(syn);
    if (*verify) return cmd_verify(ver);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ShapeError& e) {
    std::cerr << "shape error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
