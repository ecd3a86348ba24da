#include "tf2d/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "tf2d/coulomb.hpp"
#include "tf2d/elliptic.hpp"
#include "tf2d/energy.hpp"
#include "tf2d/errors.hpp"
#include "tf2d/hydrogen.hpp"
#include "tf2d/semiclassics.hpp"
#include "tf2d/spectral.hpp"
#include "tf2d/tf.hpp"

namespace tf2d {

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<double> kCurveLambdas{0.25, 0.5, 0.75, 1.0, 1.5, 2.0};

const char* const kNames[] = {"",
                              "hydrogen constant",
                              "hydrogen semiclassics",
                              "spectral oracle",
                              "elliptic asymptote",
                              "TF solve",
                              "energy identity",
                              "neutral tail",
                              "Coulomb bounds",
                              "semiclassics trend",
                              "extensivity",
                              "determinism"};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

GridPtr solver_grid() {
  static const GridPtr g = make_tf_grid(1000, 1e-6, 1e7);
  return g;
}

// Solutions on the solver grid, shared by criteria 5-10.
std::mutex cache_mutex;
std::map<double, TFSolution> cache;

const TFSolution& solution(double lambda) {
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(lambda); it != cache.end()) return it->second;
  }
  auto sol = tf_solve(lambda, solver_grid());
  std::lock_guard lock(cache_mutex);
  return cache.try_emplace(lambda, std::move(sol)).first->second;
}

void remember(const TFSolution& sol) {
  std::lock_guard lock(cache_mutex);
  cache.try_emplace(sol.lambda, sol);
}

CriterionResult c1_constant() {
  CriterionResult r{1, kNames[1], false, {}, {}};
  const double c = c_hydrogen();
  const double rounded = std::round(c * 1e4) / 1e4;
  r.passed = std::abs(rounded + 2.2339) < 1e-12;
  r.detail = fmt("c_H = %.10f, rounded %.4f", c, rounded);
  r.values = {{"c_H", c}, {"rounded", rounded}};
  return r;
}

CriterionResult c2_hydrogen_trace() {
  CriterionResult r{2, kNames[2], false, {}, {}};
  const std::vector<int> ms{10, 30, 100, 300, 1000};
  std::vector<double> errs;
  nlohmann::json rows = nlohmann::json::array();
  for (int m : ms) {
    const double mu = 1.0 / (2.0 * (m + 0.5) * (m + 0.5));
    const double err = std::abs(exact_trace(mu) - asymptotic_trace_mu(mu));
    errs.push_back(err);
    rows.push_back({{"m", m}, {"mu", mu}, {"error", err}});
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < errs.size(); ++k) decreasing &= errs[k] < errs[k - 1];
  r.passed = errs.front() <= 0.1 && errs.back() <= 0.002 && decreasing;
  r.detail = fmt("error %.3e at m=10, %.3e at m=1000, decreasing=%s", errs.front(),
                 errs.back(), decreasing ? "yes" : "no");
  r.values = {{"rows", rows}, {"decreasing", decreasing}};
  return r;
}

CriterionResult c3_spectral_oracle() {
  CriterionResult r{3, kNames[3], false, {}, {}};
  const double h = std::sqrt(0.5), R = 300.0;
  const std::size_t n = 12000;
  auto V = [](double x) { return 1.0 / x; };
  const auto coarse = channel_spectra(V, h, R, n, 3);
  const auto fine = channel_spectra(V, h, R, 2 * n, 3);
  const double q = (2.0 * n + 0.5) / (n + 0.5);
  double worst = 0.0;
  bool complete = true;
  for (int m = 0; m <= 3; ++m) {
    for (int nr = 0; nr <= 3; ++nr) {
      const auto& e1 = coarse[m].eigenvalues;
      const auto& e2 = fine[m].eigenvalues;
      if (e1.size() <= static_cast<std::size_t>(nr) || e2.size() <= static_cast<std::size_t>(nr)) {
        complete = false;
        continue;
      }
      const double x = e2[nr] + (e2[nr] - e1[nr]) / (q * q - 1.0);
      const double k = nr + m + 0.5;
      worst = std::max(worst, std::abs(x + 1.0 / (2.0 * k * k)));
    }
  }
  r.passed = complete && worst < 1e-5;
  r.detail = fmt("max |error| %.3e over |m|<=3, n_r<=3 (R=300, N=12000/24000)", worst);
  r.values = {{"max_error", worst}, {"radius", R}, {"mesh_size", n}};
  return r;
}

CriterionResult c4_elliptic(std::uint64_t seed) {
  CriterionResult r{4, kNames[4], false, {}, {}};
  const double k = 1.0 - 1e-5;
  const double gap = std::abs(ellint_K(k) - 0.5 * std::abs(std::log(1.0 - k)) - 1.5 * std::log(2.0));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  boost::math::quadrature::tanh_sinh<double> ts;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double kk = u(rng);
    auto f = [kk](double t, double tc) {
      const double one_minus_t = t > 0.5 ? tc : 1.0 - t;
      return 1.0 / std::sqrt(one_minus_t * (1.0 - kk * t));
    };
    worst = std::max(worst, std::abs(half_integral_closed_form(kk) - ts.integrate(f, 0.0, 1.0)));
  }
  r.passed = gap <= 2e-3 && worst <= 1e-9;
  r.detail = fmt("|K - ln/2 - 1.5 ln 2| = %.3e at k=1-1e-5; closed form vs quadrature %.3e", gap,
                 worst);
  r.values = {{"asymptote_gap", gap}, {"closed_form_error", worst}};
  return r;
}

CriterionResult c5_tf_solve() {
  CriterionResult r{5, kNames[5], false, {}, {}};
  const auto curve = tf_energy_curve(kCurveLambdas, solver_grid());
  double mass_err = 0.0, residual = 0.0;
  bool mu_sign = true;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : curve.solutions) {
    remember(s);
    mass_err = std::max(mass_err, std::abs(s.density.mass() - std::min(s.lambda, 1.0)));
    residual = std::max(residual, s.residual);
    mu_sign &= (s.mu > 0.0) == (s.lambda < 1.0);
    rows.push_back(s);
  }
  r.passed = mass_err <= 1e-6 && residual < 1e-6 && mu_sign && curve.decreasing &&
             curve.convex && curve.flat;
  r.detail = fmt("mass error %.2e, residual %.2e, mu sign %s, decreasing %s, convex %s, flat %s",
                 mass_err, residual, mu_sign ? "ok" : "bad", curve.decreasing ? "yes" : "no",
                 curve.convex ? "yes" : "no", curve.flat ? "yes" : "no");
  r.values = {{"solutions", rows},     {"max_mass_error", mass_err},
              {"max_residual", residual}, {"decreasing", curve.decreasing},
              {"convex", curve.convex}, {"flat", curve.flat}};
  return r;
}

CriterionResult c6_identity() {
  CriterionResult r{6, kNames[6], false, {}, {}};
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (double lambda : {0.5, 1.0}) {
    const auto& s = solution(lambda);
    const double id = tf_energy_identity(s);
    const double rel = std::abs(id - s.energy) / std::abs(s.energy);
    worst = std::max(worst, rel);
    rows.push_back({{"lambda", lambda}, {"energy", s.energy}, {"identity", id}, {"relative", rel}});
  }
  r.passed = worst <= 1e-4;
  r.detail = fmt("max relative difference %.3e", worst);
  r.values = {{"rows", rows}};
  return r;
}

CriterionResult c7_neutral_tail() {
  CriterionResult r{7, kNames[7], false, {}, {}};
  const auto rep = check_neutral_tail(solution(1.0));
  r.passed = rep.ok();
  r.detail = fmt("%zu nodes r <= %.3g: tail violations %zu (min margin %.3e), "
                 "r 2 pi rho <= g violations %zu (min margin %.3e)",
                 rep.checked, rep.cutoff, rep.tail_violations, rep.min_tail_margin,
                 rep.second_violations, rep.min_second_margin);
  r.values = {{"checked", rep.checked},
              {"tail_violations", rep.tail_violations},
              {"g_violations", rep.g_violations},
              {"second_violations", rep.second_violations},
              {"min_tail_margin", rep.min_tail_margin},
              {"min_g_margin", rep.min_g_margin},
              {"min_second_margin", rep.min_second_margin}};
  return r;
}

RadialDensity random_admissible(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double amp = 0.05 + 0.9 * u(rng), scale = 0.3 + 3.0 * u(rng);
  const double bump = u(rng), center = 0.5 + 4.0 * u(rng);
  std::vector<double> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = g->node(i);
    const double shape = amp * std::exp(-x / scale) + bump * std::exp(-(x - center) * (x - center));
    v[i] = std::min(shape, 1.0) / (2.0 * kPi * std::max(x, 1.0));
  }
  return RadialDensity(g, std::move(v));
}

CriterionResult c8_coulomb_bounds(std::uint64_t seed) {
  CriterionResult r{8, kNames[8], false, {}, {}};
  std::vector<RadialDensity> densities;
  for (double lambda : kCurveLambdas) densities.push_back(solution(lambda).density);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 20; ++k) densities.push_back(random_admissible(solver_grid(), rng));
  std::size_t lower = 0, upper = 0, nodes = 0;
  double min_lower = INFINITY, min_upper = INFINITY;
  for (const auto& rho : densities) {
    const auto& g = rho.grid();
    const auto phi = coulomb_potential_nodes(rho);
    for (std::size_t i = 0; i < g.size(); ++i) {
      // Outside the support the bound is attained; allow rounding.
      const double bound = newton_lower_bound(rho, g.node(i));
      const double slack = phi[i] - bound;
      min_lower = std::min(min_lower, slack);
      if (slack < -1e-14 * bound) ++lower;
    }
    const auto rep = check_upper_bound(rho);
    upper += rep.violations.size();
    min_upper = std::min(min_upper, rep.min_slack);
    nodes += g.size();
  }
  r.passed = lower == 0 && upper == 0;
  r.detail = fmt("%zu densities, %zu nodes: lower violations %zu (min slack %.3e), "
                 "upper violations %zu (min slack %.3e)",
                 densities.size(), nodes, lower, min_lower, upper, min_upper);
  r.values = {{"densities", densities.size()}, {"lower_violations", lower},
              {"upper_violations", upper},     {"min_lower_slack", min_lower},
              {"min_upper_slack", min_upper}};
  return r;
}

nlohmann::json run_json(const SemiclassicsRun& run) {
  return {{"weyl", run.weyl}, {"reports", run.reports}, {"decreasing", run.decreasing}};
}

CriterionResult c9_semiclassics() {
  CriterionResult r{9, kNames[9], false, {}, {}};
  const std::vector<double> hs{0.2, 0.1, 0.05};
  const auto tf = verify_semiclassics(tf_singular_potential(solution(1.0)), hs);
  SemiclassicsOptions exact;
  exact.exact_trace = [](double h) { return scaled_exact_trace(h, 1.0); };
  const auto hyd = verify_semiclassics(shifted_coulomb_potential(1.0), hs, exact);
  r.passed = tf.decreasing && hyd.decreasing;
  auto scaled = [](const SemiclassicsRun& run) {
    std::string s;
    for (const auto& rep : run.reports) s += fmt(" %.3e", rep.scaled_residual);
    return s;
  };
  r.detail = "h^2 residual V^TF:" + scaled(tf) + "; 1/r - 1 (exact):" + scaled(hyd);
  r.values = {{"h", hs}, {"tf", run_json(tf)}, {"hydrogen", run_json(hyd)}};
  return r;
}

CriterionResult c10_extensivity() {
  CriterionResult r{10, kNames[10], false, {}, {}};
  const auto rows = predict_radius_growth(solution(1.0), {0.5, 1.0, 2.0, 4.0});
  bool positive = true;
  nlohmann::json values = nlohmann::json::array();
  std::string detail = "C_R:";
  for (const auto& row : rows) {
    positive &= row.C_R > 0.0;
    values.push_back({{"R", row.R}, {"C_R", row.C_R}});
    detail += fmt(" %.3e", row.C_R);
  }
  r.passed = positive;
  r.detail = detail + " at R = 0.5, 1, 2, 4";
  r.values = {{"rows", values}};
  return r;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

bool capture(const std::string& cmd, std::string& out) {
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return false;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  return pclose(pipe) != -1;
}

CriterionResult c11_determinism(const AcceptanceOptions& opts) {
  CriterionResult r{11, kNames[11], false, {}, {}};
  if (opts.executable.empty()) {
    r.detail = "no executable to run";
    return r;
  }
  // Different worker counts for the two runs.
  const std::string args = " verify-all --criteria 1-10 --output json --quiet --seed " +
                           std::to_string(opts.seed);
  std::string a, b;
  const bool ok = capture("TF2D_THREADS=1 " + shell_quote(opts.executable) + args, a) &&
                  capture("TF2D_THREADS=3 " + shell_quote(opts.executable) + args, b);
  const bool parsed = ok && nlohmann::json::accept(a);
  r.passed = parsed && !a.empty() && a == b;
  r.detail = fmt("two runs: %zu and %zu bytes, %s", a.size(), b.size(),
                 !parsed ? "no valid report" : (a == b ? "identical" : "different"));
  r.values = {{"bytes", {a.size(), b.size()}}, {"identical", a == b}};
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  if (id < 1 || id > kCriterionCount)
    throw ParameterError("run_criterion: unknown criterion " + std::to_string(id));
  try {
    switch (id) {
      case 1: return c1_constant();
      case 2: return c2_hydrogen_trace();
      case 3: return c3_spectral_oracle();
      case 4: return c4_elliptic(opts.seed);
      case 5: return c5_tf_solve();
      case 6: return c6_identity();
      case 7: return c7_neutral_tail();
      case 8: return c8_coulomb_bounds(opts.seed);
      case 9: return c9_semiclassics();
      case 10: return c10_extensivity();
      case 11: return c11_determinism(opts);
    }
  } catch (const std::exception& e) {
    return {id, kNames[id], false, std::string("exception: ") + e.what(), {}};
  }
  return {};
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<int> ids = opts.criteria;
  if (ids.empty())
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, opts));
    if (opts.on_result) opts.on_result(out.back());
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + " " + r.name + ": " +
         (r.passed ? "PASS" : "FAIL") + "  " + r.detail;
}

nlohmann::json acceptance_report(std::uint64_t seed,
                                 const std::vector<CriterionResult>& results) {
  nlohmann::json list = nlohmann::json::array();
  bool all = true;
  for (const auto& r : results) {
    all &= r.passed;
    list.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed},
                    {"detail", r.detail}, {"values", r.values}});
  }
  return {{"seed", seed}, {"passed", all}, {"criteria", list}};
}

std::vector<int> parse_criteria(const std::string& spec) {
  std::vector<int> ids;
  std::stringstream ss(spec);
  std::string item;
  auto number = [&](const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty() || v < 1 || v > kCriterionCount)
      throw ParameterError("criteria: bad entry '" + s + "'");
    return v;
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      ids.push_back(number(item));
      continue;
    }
    const int lo = number(item.substr(0, dash)), hi = number(item.substr(dash + 1));
    if (lo > hi) throw ParameterError("criteria: empty range '" + item + "'");
    for (int i = lo; i <= hi; ++i) ids.push_back(i);
  }
  if (ids.empty()) throw ParameterError("criteria: none selected");
  return ids;
}

}  // namespace tf2d
