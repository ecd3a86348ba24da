#include "tf2d/tf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "tf2d/errors.hpp"
#include "tf2d/parallel.hpp"

namespace tf2d {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
// Nodes with |V| below this stay in (or out of) the support as they are.
constexpr double kActiveTolerance = 1e-12;

std::size_t unit_node(const RadialGrid& g) {
  const long i = g.find_node(1.0);
  if (i < 0 || g.r_max() <= 1.0)
    throw ParameterError("TF grid must contain the node r = 1 and r_max > 1");
  return static_cast<std::size_t>(i);
}

std::vector<double> tf_potential_nodes(const RadialGrid& g,
                                       const std::vector<double>& phi,
                                       double mu) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / g.node(i) - phi[i] - mu;
  return v;
}

std::vector<double> default_start(const RadialGrid& g, double lambda) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-g.node(i));
  const double m = integrate_with_core(g, v);
  for (double& x : v) x *= std::min(lambda, 1.0) / m;
  return v;
}

struct Solved {
  std::vector<double> rho;
  double mu = 0.0;
  std::size_t iterations = 0;
};

// Solves (2 pi + M) rho = 1/r - mu on the active nodes, rho = 0 elsewhere.
// With `bordered`, mu is an unknown fixed by sum mw rho = target.
void solve_on_support(const CoulombOperator& op,
                      const std::vector<std::size_t>& support, bool bordered,
                      double target, Solved& out) {
  const auto& g = op.grid();
  const auto& M = op.matrix();
  const auto mw = op.mass_weights();
  const auto m = static_cast<Eigen::Index>(support.size());
  const Eigen::Index dim = bordered ? m + 1 : m;
  Eigen::MatrixXd A(dim, dim);
  Eigen::VectorXd b(dim);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto i = static_cast<Eigen::Index>(support[a]);
    for (Eigen::Index c = 0; c < m; ++c)
      A(a, c) = M(i, static_cast<Eigen::Index>(support[c]));
    A(a, a) += kTwoPi;
    b(a) = 1.0 / g.node(support[a]) - (bordered ? 0.0 : out.mu);
  }
  if (bordered) {
    for (Eigen::Index a = 0; a < m; ++a) {
      A(a, m) = 1.0;
      A(m, a) = mw[support[a]];
    }
    A(m, m) = 0.0;
    b(m) = target;
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd x = lu.solve(b);
  for (int refine = 0; refine < 2; ++refine) x += lu.solve(b - A * x);
  if (!x.allFinite()) throw NumericError("tf_solve: singular support system");
  std::fill(out.rho.begin(), out.rho.end(), 0.0);
  for (Eigen::Index a = 0; a < m; ++a) out.rho[support[a]] = x(a);
  if (bordered) out.mu = x(m);
}

Solved solve_active_set(double lambda, const CoulombOperator& op,
                        const std::vector<double>& start,
                        const TFOptions& opts) {
  const auto& g = op.grid();
  const std::size_t n = g.size();
  const auto mw = op.mass_weights();
  std::vector<char> active(n);
  for (std::size_t i = 0; i < n; ++i) active[i] = start[i] > 0.0;
  Solved s{std::vector<double>(n, 0.0), 0.0, 0};
  bool bordered = lambda < 1.0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    s.iterations = it;
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i)
      if (active[i]) support.push_back(i);
    if (support.empty()) support.push_back(0);
    if (!bordered) s.mu = 0.0;
    solve_on_support(op, support, bordered, lambda, s);
    if (!bordered) {
      double mass = 0.0;
      for (std::size_t i = 0; i < n; ++i) mass += mw[i] * s.rho[i];
      if (mass > lambda) {
        // Truncated domain holds more than lambda at mu = 0.
        bordered = true;
        solve_on_support(op, support, bordered, lambda, s);
      }
    }
    const auto v = tf_potential_nodes(g, op.apply(s.rho), s.mu);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const bool next = active[i] ? v[i] > -kActiveTolerance
                                  : v[i] > kActiveTolerance;
      changed |= next != static_cast<bool>(active[i]);
      active[i] = next;
    }
    if (!changed) {
      for (double& x : s.rho) x = std::max(x, 0.0);
      return s;
    }
  }
  throw ConvergenceError("tf_solve: support did not stabilize after " +
                         std::to_string(opts.max_iterations) + " iterations");
}

// Fixed-point at fixed mu; returns the residual reached.
double damped_fixed_point(const CoulombOperator& op, double mu,
                          std::vector<double>& rho, const TFOptions& opts,
                          std::size_t& steps) {
  const auto& g = op.grid();
  double t = opts.mixing, previous = std::numeric_limits<double>::infinity();
  double res = previous;
  for (std::size_t k = 0; k < opts.max_inner; ++k, ++steps) {
    const auto v = tf_potential_nodes(g, op.apply(rho), mu);
    res = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      res = std::max(res, std::abs(kTwoPi * rho[i] - std::max(v[i], 0.0)));
    if (res < opts.tolerance) break;
    if (res > previous) t *= 0.5;
    previous = res;
    for (std::size_t i = 0; i < rho.size(); ++i)
      rho[i] = (1.0 - t) * rho[i] + t * std::max(v[i], 0.0) / kTwoPi;
  }
  return res;
}

Solved solve_damped(double lambda, const CoulombOperator& op,
                    const std::vector<double>& start, const TFOptions& opts) {
  const auto mw = op.mass_weights();
  auto mass_of = [&](const std::vector<double>& r) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) m += mw[i] * r[i];
    return m;
  };
  Solved s{start, 0.0, 0};
  auto run = [&](double mu) {
    std::vector<double> rho = s.rho;
    const double res = damped_fixed_point(op, mu, rho, opts, s.iterations);
    if (!(res < opts.tolerance)) {
      std::ostringstream msg;
      msg << "tf_solve (damped): residual " << res << " at mu = " << mu
          << " after " << opts.max_inner << " steps";
      throw ConvergenceError(msg.str());
    }
    return rho;
  };
  auto rho0 = run(0.0);
  if (lambda >= 1.0 || mass_of(rho0) <= lambda) {
    s.rho = rho0;
    return s;
  }
  double lo = 0.0, hi = 1.0;
  auto rho_hi = run(hi);
  while (mass_of(rho_hi) > lambda) {
    lo = hi;
    hi *= 2.0;
    rho_hi = run(hi);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    auto rho = run(mid);
    s.rho = rho;
    if (mass_of(rho) > lambda) lo = mid; else hi = mid;
    if (std::abs(mass_of(rho) - lambda) < 1e-12) break;
  }
  s.mu = 0.5 * (lo + hi);
  s.rho = run(s.mu);
  return s;
}

std::optional<double> find_support_radius(const RadialGrid& g,
                                          const std::vector<double>& rho,
                                          const std::vector<double>& v) {
  const std::size_t n = g.size();
  if (rho[n - 1] > 0.0) return std::nullopt;
  std::size_t last = 0;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i)
    if (rho[i] > 0.0) {
      last = i;
      any = true;
    }
  if (!any) return g.r_min();
  const double a = g.node(last), b = g.node(last + 1);
  const double va = v[last], vb = v[last + 1];
  if (!(va > 0.0) || !(vb <= 0.0)) return b;
  return a + (b - a) * va / (va - vb);
}

}  // namespace

GridPtr make_tf_grid(std::size_t n, double r_min, double r_max) {
  if (!(r_max > 1.0)) throw ParameterError("make_tf_grid: need r_max > 1");
  return std::make_shared<const RadialGrid>(
      make_log_grid_through(n, r_min, r_max, 1.0));
}

double tf_functional(const RadialDensity& rho) {
  const auto& g = rho.grid();
  if (!(g.r_max() > 1.0)) throw ParameterError("tf_functional: need r_max > 1");
  const auto mw = mass_weights(g);
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = rho.value(i) - 1.0 / (kTwoPi * g.node(i));
    sum += mw[i] * kPi * d * d;
  }
  return sum - 0.5 * std::log(g.r_max()) + coulomb_energy(rho, rho) - 0.75;
}

double tf_functional_raw(const RadialDensity& rho) {
  const auto& g = rho.grid();
  const std::size_t i1 = unit_node(g);
  const auto inner = g.range_weights(0, i1);
  const auto outer = g.range_weights(i1, g.size() - 1);
  std::vector<double> f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i), p = rho.value(i);
    const double c = std::max(1.0 / r - 1.0, 0.0);
    f[i] = kPi * p * p - p / r + c * c / (4.0 * kPi);
  }
  double sum = g.core_integral(f[0]);
  for (std::size_t i = 0; i < g.size(); ++i) sum += (inner[i] + outer[i]) * f[i];
  return sum + coulomb_energy(rho, rho);
}

double tf_residual(const RadialDensity& rho, double mu,
                   const std::vector<double>& potential) {
  const auto& g = rho.grid();
  double res = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = 1.0 / g.node(i) - potential[i] - mu;
    res = std::max(res, std::abs(kTwoPi * rho.value(i) - std::max(v, 0.0)));
  }
  return res;
}

TFSolution tf_solve(double lambda, const GridPtr& grid, const TFOptions& opts) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParameterError("tf_solve: lambda must be positive");
  if (!grid) throw ParameterError("tf_solve: null grid");
  unit_node(*grid);
  const auto op = coulomb_operator(grid);
  std::vector<double> start;
  if (opts.initial) {
    start = *opts.initial;
    if (start.size() != grid->size())
      throw ParameterError("tf_solve: initial density length mismatch");
  } else {
    start = default_start(*grid, lambda);
  }
  Solved s = opts.method == TFMethod::active_set
                 ? solve_active_set(lambda, *op, start, opts)
                 : solve_damped(lambda, *op, start, opts);

  RadialDensity density(grid, std::move(s.rho));
  auto phi = op->apply(density.values());
  const double residual = tf_residual(density, s.mu, phi);
  if (!(residual < opts.tolerance)) {
    std::ostringstream msg;
    msg << "tf_solve: residual " << residual << " >= tolerance "
        << opts.tolerance << " after " << s.iterations << " iterations";
    throw ConvergenceError(msg.str());
  }
  const auto v = tf_potential_nodes(*grid, phi, s.mu);
  auto support = find_support_radius(*grid, {density.values().begin(),
                                             density.values().end()}, v);
  const double energy = tf_functional(density);
  TFSolution sol{lambda,   std::move(density), s.mu,  energy, residual,
                 s.iterations, std::move(phi),  support, {}};
  if (support && 2.0 * *support > grid->r_max())
    sol.warnings.push_back("support radius exceeds r_max/2");
  if (!support && lambda < 1.0)
    sol.warnings.push_back("density does not vanish before r_max");
  return sol;
}

EnergyCurve tf_energy_curve(const std::vector<double>& lambdas,
                            const GridPtr& grid, const TFOptions& opts,
                            double flat_tolerance) {
  if (lambdas.empty()) throw ParameterError("tf_energy_curve: no lambda values");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0))
      throw ParameterError("tf_energy_curve: lambda must be positive");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1]))
      throw ParameterError("tf_energy_curve: lambda values must ascend");
  }
  coulomb_operator(grid);  // assemble once before the workers share it
  std::vector<std::optional<TFSolution>> slots(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t k) {
    slots[k] = tf_solve(lambdas[k], grid, opts);
  });
  EnergyCurve curve;
  for (auto& s : slots) curve.solutions.push_back(std::move(*s));

  std::vector<double> lam, e;
  for (const auto& s : curve.solutions)
    if (s.lambda <= 1.0) {
      lam.push_back(s.lambda);
      e.push_back(s.energy);
    }
  curve.decreasing = true;
  for (std::size_t k = 1; k < e.size(); ++k)
    curve.decreasing &= e[k] < e[k - 1];
  curve.convex = true;
  for (std::size_t k = 2; k < e.size(); ++k) {
    const double s1 = (e[k - 1] - e[k - 2]) / (lam[k - 1] - lam[k - 2]);
    const double s2 = (e[k] - e[k - 1]) / (lam[k] - lam[k - 1]);
    curve.convex &= s2 > s1;
  }
  curve.flat = true;
  const TFSolution* reference = nullptr;
  for (const auto& s : curve.solutions)
    if (s.lambda >= 1.0) {
      if (!reference) reference = &s;
      curve.flat &= std::abs(s.energy - reference->energy) <= flat_tolerance;
    }
  return curve;
}

double tail_function_g(const RadialDensity& rho, double r) {
  if (!(r >= 0.0)) throw DomainError("tail_function_g: need r >= 0");
  const auto& g = rho.grid();
  if (r >= g.r_max()) return 0.0;
  const double r0 = g.r_min();
  double sum = 0.0;
  if (r <= r0) {
    for (std::size_t j = 0; j < g.size(); ++j)
      sum += g.weight(j) * rho.value(j) * (1.0 - r / g.node(j));
    // Core cell with rho = q0/s: 2 pi q0 int_r^{r0} (1 - r/s) ds.
    const double q0 = rho.value(0) * r0;
    if (r == 0.0) sum += kTwoPi * q0 * r0;
    else sum += kTwoPi * q0 * ((r0 - r) - r * std::log(r0 / r));
    return sum;
  }
  // End-corrected rule from the first node >= r, Gauss-Legendre in ln s on
  // the partial cell.
  const long exact = g.find_node(r);
  const std::size_t k =
      exact >= 0 ? static_cast<std::size_t>(exact) : g.bracket(r) + 1;
  const auto w = g.range_weights(k, g.size() - 1);
  for (std::size_t j = k; j < g.size(); ++j)
    sum += w[j] * rho.value(j) * (1.0 - r / g.node(j));
  if (exact < 0) {
    const double ua = std::log(r), ub = std::log(g.node(k));
    const double mid = 0.5 * (ua + ub), half = 0.5 * (ub - ua);
    constexpr double x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (int q = 0; q < 3; ++q) {
      const double s = std::exp(mid + half * x[q]);
      sum += half * gw[q] * kTwoPi * s * s * (1.0 - r / s) *
             g.interpolate(rho.values(), s);
    }
  }
  return sum;
}

std::vector<double> tail_mass(const RadialDensity& rho) {
  const auto& g = rho.grid();
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    t[i] = g.integrate_from(rho.values(), g.node(i));
  return t;
}

NeutralTailReport check_neutral_tail(const TFSolution& sol) {
  if (sol.lambda < 1.0)
    throw ParameterError("check_neutral_tail: requires lambda >= 1");
  const auto& rho = sol.density;
  const auto& g = rho.grid();
  NeutralTailReport rep;
  rep.cutoff = 0.5 * g.r_max();
  rep.min_tail_margin = rep.min_g_margin = rep.min_second_margin =
      std::numeric_limits<double>::infinity();
  const auto tail = tail_mass(rho);
  for (std::size_t i = 0; i < g.size() && g.node(i) <= rep.cutoff; ++i) {
    const double r = g.node(i);
    const double bound = std::exp(-2.0 * std::sqrt(r));
    const double gr = tail_function_g(rho, r);
    const double tail_margin = tail[i] - bound;
    const double g_margin = gr - bound;
    const double second_margin = gr - r * kTwoPi * rho.value(i);
    rep.min_tail_margin = std::min(rep.min_tail_margin, tail_margin);
    rep.min_g_margin = std::min(rep.min_g_margin, g_margin);
    rep.min_second_margin = std::min(rep.min_second_margin, second_margin);
    rep.tail_violations += tail_margin < 0.0;
    rep.g_violations += g_margin < 0.0;
    rep.second_violations += second_margin < 0.0;
    ++rep.checked;
  }
  rep.tail_beyond_one = g.integrate_from(rho.values(), 1.0);
  return rep;
}

double tf_potential(const TFSolution& sol, double r) {
  if (!(r > 0.0)) throw DomainError("tf_potential: need r > 0");
  const auto& g = sol.density.grid();
  double phi;
  if (r <= g.r_min()) {
    phi = sol.potential.front();
  } else if (r >= g.r_max()) {
    phi = sol.density.mass() / r;
  } else {
    phi = g.interpolate(sol.potential, r);
  }
  return 1.0 / r - phi - sol.mu;
}

double tf_energy_identity(const TFSolution& sol) {
  const auto& rho = sol.density;
  const auto& g = rho.grid();
  const std::size_t i1 = unit_node(g);
  const auto inner = g.range_weights(0, i1);
  const auto outer = g.range_weights(i1, g.size() - 1);
  std::vector<double> q(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i);
    const double v = std::max(1.0 / r - sol.potential[i] - sol.mu, 0.0);
    const double c = std::max(1.0 / r - 1.0, 0.0);
    q[i] = v * v - c * c;
  }
  double integral = g.core_integral(q[0]);
  for (std::size_t i = 0; i < g.size(); ++i)
    integral += (inner[i] + outer[i]) * q[i];
  return -integral / (4.0 * kPi) - sol.mu * rho.mass() -
         coulomb_energy(rho, rho);
}

void to_json(nlohmann::json& j, const TFSolution& sol) {
  j = nlohmann::json{{"lambda", sol.lambda},
                     {"mu", sol.mu},
                     {"energy", sol.energy},
                     {"mass", sol.density.mass()},
                     {"residual", sol.residual}};
  j["support_radius"] = sol.support_radius ? nlohmann::json(*sol.support_radius)
                                           : nlohmann::json(nullptr);
}

}  // namespace tf2d
