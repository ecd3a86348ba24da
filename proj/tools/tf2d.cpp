// tf2d command-line front end.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tf2d/acceptance.hpp"
#include "tf2d/coulomb.hpp"
#include "tf2d/energy.hpp"
#include "tf2d/errors.hpp"
#include "tf2d/hydrogen.hpp"
#include "tf2d/semiclassics.hpp"
#include "tf2d/tf.hpp"

namespace {

using namespace tf2d;
using nlohmann::json;

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string output = "text";
  bool quiet = false;
};

struct GridArgs {
  std::size_t size = 1000;
  double r_min = 1e-6;
  double r_max = 1e7;

  GridPtr make() const {
    if (!(r_min > 0.0 && r_min < 1.0 && r_max > 1.0) || size < 10)
      throw UsageError("grid: need 0 < r-min < 1 < r-max and grid-size >= 10");
    return make_tf_grid(size, r_min, r_max);
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--output", c.output, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  cmd->add_flag("--quiet", c.quiet, "Suppress the text summary and progress");
}

void add_grid(CLI::App* cmd, GridArgs& g) {
  cmd->add_option("--grid-size", g.size, "Solver grid nodes")->capture_default_str();
  cmd->add_option("--r-min", g.r_min, "Innermost grid node")->capture_default_str();
  cmd->add_option("--r-max", g.r_max, "Outermost grid node")->capture_default_str();
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

// ---- tf-solve

struct TFSolveArgs {
  Common common;
  GridArgs grid;
  double lambda = 0.0;
  double tolerance = 1e-9;
  std::string method = "newton";
  std::string density_csv;
  std::string report;
};

int cmd_tf_solve(const TFSolveArgs& a) {
  TFOptions opts;
  opts.tolerance = a.tolerance;
  opts.method = a.method == "damped" ? TFMethod::damped : TFMethod::active_set;
  const auto sol = tf_solve(a.lambda, a.grid.make(), opts);
  const json j = sol;
  if (!a.report.empty()) write_file(a.report, j.dump(2) + "\n");
  if (!a.density_csv.empty()) {
    std::ostringstream csv;
    write_density_csv(csv, sol.density, sol.potential);
    write_file(a.density_csv, csv.str());
  }
  if (a.common.output == "json") {
    print_json(j);
  } else if (a.common.output == "csv") {
    write_density_csv(std::cout, sol.density, sol.potential);
  } else if (!a.common.quiet) {
    std::cout << std::setprecision(10) << "lambda   " << sol.lambda << "\nmu       "
              << sol.mu << "\nE_TF     " << sol.energy << "\nmass     "
              << sol.density.mass() << "\nresidual " << sol.residual << '\n';
    if (sol.support_radius) std::cout << "support  " << *sol.support_radius << '\n';
  }
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << '\n';
  return kOk;
}

// ---- tf-curve

struct TFCurveArgs {
  Common common;
  GridArgs grid;
  std::vector<double> lambdas{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
};

int cmd_tf_curve(const TFCurveArgs& a) {
  auto lambdas = a.lambdas;
  if (!std::is_sorted(lambdas.begin(), lambdas.end()) ||
      std::adjacent_find(lambdas.begin(), lambdas.end()) != lambdas.end())
    throw UsageError("--lambdas must be strictly ascending");
  const auto curve = tf_energy_curve(lambdas, a.grid.make());
  const bool ok = curve.decreasing && curve.convex && curve.flat;
  if (a.common.output == "json") {
    print_json({{"solutions", curve.solutions},
                {"decreasing", curve.decreasing},
                {"convex", curve.convex},
                {"flat", curve.flat}});
  } else if (a.common.output == "csv") {
    std::cout << "lambda,mu,energy,mass,residual\n" << std::setprecision(17);
    for (const auto& s : curve.solutions)
      std::cout << s.lambda << ',' << s.mu << ',' << s.energy << ',' << s.density.mass()
                << ',' << s.residual << '\n';
  } else if (!a.common.quiet) {
    std::cout << std::setprecision(10);
    for (const auto& s : curve.solutions)
      std::cout << "lambda " << s.lambda << "  E " << s.energy << "  mu " << s.mu << '\n';
    std::cout << "decreasing " << curve.decreasing << "  convex " << curve.convex
              << "  flat " << curve.flat << '\n';
  }
  return ok ? kOk : kFailed;
}

// ---- semiclassics

struct SemiclassicsArgs {
  Common common;
  GridArgs grid;
  std::string potential = "hydrogen-shifted";
  double mu = 1.0;
  std::vector<double> h{0.2, 0.1, 0.05};
  bool exact = false;
  double kappa = 1.0, theta = 0.5, C = 1.0, delta = 1.0;
  std::string report;
};

// Table potential: r V(r) interpolated linearly in r, held constant below the
// first row and continued as (r_n V_n)/r past the last.
RadialPotential table_potential(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read potential file " + path);
  std::vector<double> rs, rv;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream in(line);
    double r = 0.0, v = 0.0;
    if (!(in >> r >> v)) {
      if (rs.empty()) continue;  // header
      throw UsageError("potential file: bad row '" + line + "'");
    }
    if (!(r > 0.0) || (!rs.empty() && !(r > rs.back())) || !std::isfinite(v))
      throw UsageError("potential file: r must be positive and increasing");
    rs.push_back(r);
    rv.push_back(r * v);
  }
  if (rs.size() < 2) throw UsageError("potential file: need at least two rows");
  auto rs_p = std::make_shared<const std::vector<double>>(std::move(rs));
  auto rv_p = std::make_shared<const std::vector<double>>(std::move(rv));
  return [rs_p, rv_p](double r) {
    const auto& x = *rs_p;
    const auto& y = *rv_p;
    if (r <= x.front()) return y.front() / r;
    if (r >= x.back()) return y.back() / r;
    const auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), r) - x.begin());
    const double t = (r - x[k - 1]) / (x[k] - x[k - 1]);
    return ((1.0 - t) * y[k - 1] + t * y[k]) / r;
  };
}

int cmd_semiclassics(const SemiclassicsArgs& a) {
  for (std::size_t k = 0; k < a.h.size(); ++k)
    if (!(a.h[k] > 0.0) || (k > 0 && !(a.h[k] < a.h[k - 1])))
      throw UsageError("--h must be positive and strictly descending");
  if (a.h.empty()) throw UsageError("--h: no values");
  SemiclassicsOptions opts;
  std::optional<SingularPotential> V;
  std::string label = a.potential;
  if (a.potential == "hydrogen-shifted") {
    V = shifted_coulomb_potential(a.mu, a.kappa);
    if (a.exact) {
      if (a.kappa != 1.0) throw UsageError("--exact needs --kappa 1");
      const double mu = a.mu;
      opts.exact_trace = [mu](double h) { return scaled_exact_trace(h, mu); };
    }
  } else if (a.potential.rfind("tf:", 0) == 0) {
    double lambda = 0.0;
    try {
      std::size_t pos = 0;
      lambda = std::stod(a.potential.substr(3), &pos);
      if (pos != a.potential.size() - 3) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("--potential tf:<lambda>: bad lambda");
    }
    if (!(lambda > 0.0)) throw UsageError("--potential tf:<lambda>: need lambda > 0");
    if (!a.common.quiet) std::cerr << "solving TF at lambda " << lambda << "\n";
    V = tf_singular_potential(tf_solve(lambda, a.grid.make()));
  } else if (a.potential.rfind("file:", 0) == 0) {
    V = SingularPotential(table_potential(a.potential.substr(5)),
                          {a.kappa, a.theta, a.C, a.delta});
  } else {
    throw UsageError("--potential: expected hydrogen-shifted, tf:<lambda> or file:<path>");
  }
  if (a.exact && a.potential != "hydrogen-shifted")
    throw UsageError("--exact applies to hydrogen-shifted only");

  const auto run = verify_semiclassics(*V, a.h, opts);
  const json j = {{"potential", label},
                  {"weyl", run.weyl},
                  {"reports", run.reports},
                  {"decreasing", run.decreasing}};
  if (!a.report.empty()) write_file(a.report, j.dump(2) + "\n");
  if (a.common.output == "json") {
    print_json(j);
  } else if (a.common.output == "csv") {
    write_semiclassics_csv(std::cout, run);
  } else if (!a.common.quiet || !run.decreasing) {
    auto& out = run.decreasing ? std::cout : std::cerr;
    out << "weyl " << std::setprecision(12) << run.weyl << '\n';
    write_semiclassics_csv(out, run);
    out << (run.decreasing ? "h^2 residual decreasing\n" : "h^2 residual NOT decreasing\n");
  }
  return run.decreasing ? kOk : kFailed;
}

// ---- hydrogen-check

struct HydrogenArgs {
  Common common;
  std::int64_t m_max = 1000;
};

int cmd_hydrogen_check(const HydrogenArgs& a) {
  if (a.m_max < 10) throw UsageError("--m-max must be >= 10");
  std::vector<std::int64_t> ms;
  for (std::int64_t m = 10; m < a.m_max; m *= 10) ms.push_back(m);
  ms.push_back(a.m_max);
  const double c = c_hydrogen();
  const bool constant_ok = std::abs(std::round(c * 1e4) / 1e4 + 2.2339) < 1e-12;
  json rows = json::array();
  bool decreasing = true;
  double prev = INFINITY;
  for (auto m : ms) {
    const double mu = 1.0 / (2.0 * (m + 0.5) * (m + 0.5));
    const double exact = exact_trace(mu), asym = asymptotic_trace_mu(mu);
    const double err = std::abs(exact - asym);
    decreasing &= err < prev;
    prev = err;
    rows.push_back({{"m", m}, {"mu", mu}, {"exact", exact}, {"asymptotic", asym}, {"error", err}});
  }
  const bool ok = constant_ok && decreasing;
  if (a.common.output == "json") {
    print_json({{"c_H", c}, {"ladder", rows}, {"decreasing", decreasing}, {"passed", ok}});
  } else if (a.common.output == "csv") {
    std::cout << "m,mu,exact,asymptotic,error\n" << std::setprecision(17);
    for (const auto& r : rows)
      std::cout << r["m"].get<std::int64_t>() << ',' << r["mu"].get<double>() << ','
                << r["exact"].get<double>() << ',' << r["asymptotic"].get<double>() << ','
                << r["error"].get<double>() << '\n';
  } else if (!a.common.quiet) {
    std::cout << "c_H = " << std::setprecision(8) << c << '\n';
    for (const auto& r : rows)
      std::cout << "m " << r["m"].get<std::int64_t>() << "  |exact - asymptotic| = "
                << std::setprecision(6) << r["error"].get<double>() << '\n';
  }
  if (!constant_ok) std::cerr << "hydrogen-check: c_H does not round to -2.2339\n";
  if (!decreasing) std::cerr << "hydrogen-check: error not decreasing in m\n";
  return ok ? kOk : kFailed;
}

// ---- energy-predict

struct EnergyArgs {
  Common common;
  GridArgs grid;
  double Z = 0.0, N = 0.0;
};

int cmd_energy_predict(const EnergyArgs& a) {
  const AtomSpec spec{a.Z, a.N};
  const auto sol = tf_solve(std::min(spec.lambda(), 1.0), a.grid.make());
  const auto p = predict_energy(spec, sol.energy);
  const json j = p;
  if (a.common.output == "json") {
    print_json(j);
  } else if (a.common.output == "csv") {
    std::cout << "Z,N,lambda,E_predicted,leading,second\n" << std::setprecision(17) << p.Z
              << ',' << p.N << ',' << p.lambda << ',' << p.total << ',' << p.leading << ','
              << p.second << '\n';
  } else if (!a.common.quiet) {
    std::cout << std::setprecision(10) << "two-term asymptote E = " << p.total
              << "\n  -Z^2 ln Z / 2       " << p.leading << "\n  (E_TF + c_H/2) Z^2  "
              << p.second << "\n  E_TF(" << std::min(spec.lambda(), 1.0) << ") = " << sol.energy
              << '\n';
  }
  return kOk;
}

// ---- coulomb-check

struct CoulombArgs {
  Common common;
  std::uint64_t seed = 1;
};

int cmd_coulomb_check(const CoulombArgs& a) {
  AcceptanceOptions opts;
  opts.seed = a.seed;
  const auto r = run_criterion(8, opts);
  if (a.common.output == "json") {
    print_json(acceptance_report(a.seed, {r}));
  } else if (a.common.output == "csv") {
    std::cout << "id,name,passed,detail\n"
              << r.id << ',' << csv_field(r.name) << ',' << (r.passed ? "true" : "false") << ','
              << csv_field(r.detail) << '\n';
  } else if (!a.common.quiet) {
    std::cout << format_result(r) << '\n';
  }
  return r.passed ? kOk : kFailed;
}

// ---- verify-all

struct VerifyArgs {
  Common common;
  std::uint64_t seed = 1;
  std::string criteria;
  std::string report;
};

std::string self_path(const char* argv0) {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

int cmd_verify_all(const VerifyArgs& a, const char* argv0) {
  AcceptanceOptions opts;
  opts.seed = a.seed;
  opts.executable = self_path(argv0);
  if (!a.criteria.empty()) {
    try {
      opts.criteria = parse_criteria(a.criteria);
    } catch (const ParameterError& e) {
      throw UsageError(e.what());
    }
  }
  if (a.common.output == "text" && !a.common.quiet)
    opts.on_result = [](const CriterionResult& r) {
      std::cout << format_result(r) << std::endl;
    };
  const auto results = run_acceptance(opts);
  const json report = acceptance_report(a.seed, results);
  if (!a.report.empty()) write_file(a.report, report.dump(2) + "\n");
  if (a.common.output == "json") {
    print_json(report);
  } else if (a.common.output == "csv") {
    std::cout << "id,name,passed,detail\n";
    for (const auto& r : results)
      std::cout << r.id << ',' << csv_field(r.name) << ',' << (r.passed ? "true" : "false")
                << ',' << csv_field(r.detail) << '\n';
  }
  bool ok = true;
  for (const auto& r : results)
    if (!r.passed) {
      ok = false;
      std::cerr << "FAILED: criterion " << r.id << " " << r.name << '\n';
    }
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-dimensional Thomas-Fermi and semiclassics toolkit"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  TFSolveArgs solve;
  auto* c_solve = app.add_subcommand("tf-solve", "Solve the TF equation at one lambda");
  add_common(c_solve, solve.common);
  add_grid(c_solve, solve.grid);
  c_solve->add_option("--lambda", solve.lambda, "N/Z")->required()->check(
      CLI::PositiveNumber);
  c_solve->add_option("--tolerance", solve.tolerance, "TF residual target")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_solve->add_option("--method", solve.method, "Solver")
      ->check(CLI::IsMember({"newton", "damped"}))
      ->capture_default_str();
  c_solve->add_option("--density-csv", solve.density_csv, "Write r,rho,potential CSV");
  c_solve->add_option("--report", solve.report, "Write the solution JSON");

  TFCurveArgs curve;
  auto* c_curve = app.add_subcommand("tf-curve", "E^TF(lambda) and its shape");
  add_common(c_curve, curve.common);
  add_grid(c_curve, curve.grid);
  c_curve->add_option("--lambdas", curve.lambdas, "Ascending lambda values")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SemiclassicsArgs semi;
  auto* c_semi = app.add_subcommand(
      "semiclassics", "Negative-eigenvalue sum against the two-term formula");
  add_common(c_semi, semi.common);
  add_grid(c_semi, semi.grid);
  c_semi->add_option("--potential", semi.potential,
                     "hydrogen-shifted (kappa/r - mu), tf:<lambda>, or file:<path> "
                     "(CSV columns r,V; r V interpolated linearly)")
      ->capture_default_str();
  c_semi->add_option("--mu", semi.mu, "Shift for hydrogen-shifted")->capture_default_str();
  c_semi->add_option("--h", semi.h, "Descending h values")
      ->delimiter(',')
      ->capture_default_str();
  c_semi->add_flag("--exact", semi.exact, "Use the exact hydrogen trace (hydrogen-shifted)");
  c_semi->add_option("--kappa", semi.kappa, "Certificate: singularity strength")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_semi->add_option("--theta", semi.theta, "Certificate: exponent in (0,1)")
      ->capture_default_str();
  c_semi->add_option("--C", semi.C, "Certificate: constant")->capture_default_str();
  c_semi->add_option("--delta", semi.delta, "Certificate: radius")->capture_default_str();
  c_semi->add_option("--report", semi.report, "Write the report JSON");

  HydrogenArgs hyd;
  auto* c_hyd = app.add_subcommand("hydrogen-check", "Exact vs asymptotic hydrogen traces");
  add_common(c_hyd, hyd.common);
  c_hyd->add_option("--m-max", hyd.m_max, "Largest ladder index")->capture_default_str();

  EnergyArgs en;
  auto* c_en = app.add_subcommand("energy-predict", "Two-term energy asymptote");
  add_common(c_en, en.common);
  add_grid(c_en, en.grid);
  c_en->add_option("--Z", en.Z, "Nuclear charge")->required()->check(CLI::PositiveNumber);
  c_en->add_option("--N", en.N, "Electron number")->required()->check(CLI::PositiveNumber);

  CoulombArgs cou;
  auto* c_cou = app.add_subcommand(
      "coulomb-check", "Newton and explicit potential bounds on TF and random densities");
  add_common(c_cou, cou.common);
  c_cou->add_option("--seed", cou.seed, "RNG seed")->capture_default_str();

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify-all", "Run the acceptance criteria");
  add_common(c_ver, ver.common);
  c_ver->add_option("--seed", ver.seed, "RNG seed")->capture_default_str();
  c_ver->add_option("--criteria", ver.criteria, "Subset, e.g. 1-4,7 (default all)");
  c_ver->add_option("--report", ver.report, "Write the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*c_solve) return cmd_tf_solve(solve);
    if (*c_curve) return cmd_tf_curve(curve);
    if (*c_semi) return cmd_semiclassics(semi);
    if (*c_hyd) return cmd_hydrogen_check(hyd);
    if (*c_en) return cmd_energy_predict(en);
    if (*c_cou) return cmd_coulomb_check(cou);
    if (*c_ver) return cmd_verify_all(ver, argv[0]);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
