#include "tf2d/semiclassics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "tf2d/errors.hpp"
#include "tf2d/hydrogen.hpp"
#include "tf2d/parallel.hpp"

namespace tf2d {

namespace {

constexpr double kPi = std::numbers::pi;

double weyl_density(const SingularPotential& V, double r) {
  const double kappa = V.certificate().kappa;
  const double v = std::max(V(r), 0.0);
  const double c = std::max(1.0 / r - 1.0, 0.0);
  return v * v - kappa * kappa * c * c;
}

// int_a^b f(r) 2 pi r dr in u = ln r.
double cell_integral(const SingularPotential& V, double a, double b) {
  auto g = [&](double u) {
    const double r = std::exp(u);
    return weyl_density(V, r) * 2.0 * kPi * r * r;
  };
  return boost::math::quadrature::gauss<double, 8>::integrate(g, std::log(a),
                                                              std::log(b));
}

}  // namespace

SingularPotential::SingularPotential(RadialPotential V, SingularityCertificate cert)
    : V_(std::move(V)), cert_(cert) {
  if (!V_) throw ParameterError("SingularPotential: empty function");
  if (!(cert_.kappa > 0.0) || !(cert_.theta > 0.0 && cert_.theta < 1.0) ||
      !(cert_.C > 0.0) || !(cert_.delta > 0.0))
    throw ParameterError(
        "SingularPotential: need kappa > 0, 0 < theta < 1, C > 0, delta > 0");
  constexpr int samples = 200;
  for (int k = 0; k < samples; ++k) {
    const double r = cert_.delta * std::pow(10.0, -8.0 * k / (samples - 1));
    const double v = V_(r);
    const double bound = cert_.C * std::pow(r, -cert_.theta);
    if (!std::isfinite(v) || std::abs(v - cert_.kappa / r) > bound * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "SingularPotential: |V - kappa/r| = " << std::abs(v - cert_.kappa / r)
          << " exceeds C r^-theta = " << bound << " at r = " << r;
      throw CertificateError(msg.str());
    }
  }
}

SingularPotential shifted_coulomb_potential(double mu, double kappa) {
  if (!std::isfinite(mu)) throw ParameterError("shifted_coulomb_potential: mu not finite");
  return SingularPotential([mu, kappa](double r) { return kappa / r - mu; },
                           {kappa, 0.5, std::max(std::abs(mu), 1e-12), 1.0});
}

SingularPotential tf_singular_potential(const TFSolution& sol) {
  auto shared = std::make_shared<const TFSolution>(sol);
  const auto& g = shared->density.grid();
  double phi = 0.0;
  for (std::size_t i = 0; i < g.size() && g.node(i) <= 1.0; ++i)
    phi = std::max(phi, shared->potential[i]);
  const double C = 1.01 * (phi + shared->mu);
  return SingularPotential(
      [shared](double r) { return tf_potential(*shared, r); },
      {1.0, 0.5, std::max(C, 1e-12), 1.0});
}

double weyl_integral(const SingularPotential& V, const RadialGrid& grid) {
  const auto& cert = V.certificate();
  const double r0 = grid.r_min();
  const double f0 = weyl_density(V, r0);
  if (std::abs(f0) * r0 * r0 > 1e-2 * cert.kappa * cert.kappa) {
    std::ostringstream msg;
    msg << "weyl_integral: integrand does not cancel near 0 (r^2 f = "
        << f0 * r0 * r0 << " at r = " << r0 << ")";
    throw CertificateError(msg.str());
  }
  // Core under a power law f ~ f(r0) (r/r0)^p fitted on the first two
  // nodes; the certified p = -1 - theta if the fit is unusable.
  double p = -1.0 - cert.theta;
  const double f1 = weyl_density(V, grid.node(1));
  if (f0 != 0.0 && f1 / f0 > 0.0) {
    const double fit = std::log(f1 / f0) / std::log(grid.node(1) / r0);
    if (fit > -2.0 && fit < 2.0) p = fit;
  }
  double total = 2.0 * kPi * f0 * r0 * r0 / (2.0 + p);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    std::vector<double> cuts{grid.node(i), grid.node(i + 1)};
    if (cuts[0] < 1.0 && 1.0 < cuts[1]) cuts.insert(cuts.begin() + 1, 1.0);
    std::vector<double> split{cuts.front()};
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double a = cuts[k], b = cuts[k + 1];
      const double va = V(a), vb = V(b);
      if ((va > 0.0) != (vb > 0.0)) {
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        std::uintmax_t iters = 100;
        const auto root = boost::math::tools::toms748_solve(
            [&](double r) { return V(r); }, a, b, va, vb, tol, iters);
        split.push_back(0.5 * (root.first + root.second));
      }
      split.push_back(b);
    }
    for (std::size_t k = 0; k + 1 < split.size(); ++k)
      if (split[k + 1] > split[k]) total += cell_integral(V, split[k], split[k + 1]);
  }
  if (!std::isfinite(total)) throw NumericError("weyl_integral: non-finite value");
  return total;
}

double weyl_integral(const SingularPotential& V) {
  static const RadialGrid grid = make_log_grid(4000, 1e-8, 1e4);
  return weyl_integral(V, grid);
}

double two_term_formula(double kappa, double weyl, double h) {
  if (!(h > 0.0) || !(kappa > 0.0))
    throw ParameterError("two_term_formula: need h > 0, kappa > 0");
  const double h2 = h * h;
  return -weyl / (8.0 * kPi * h2) +
         kappa * kappa * (std::log(2.0 * h2 / kappa) + c_hydrogen()) / (4.0 * h2);
}

double two_term_formula(const SingularPotential& V, double h) {
  return two_term_formula(V.certificate().kappa, weyl_integral(V), h);
}

SemiclassicsRun verify_semiclassics(const SingularPotential& V,
                                    const std::vector<double>& h_values,
                                    const SemiclassicsOptions& opts) {
  if (h_values.empty()) throw ParameterError("verify_semiclassics: no h values");
  for (std::size_t k = 0; k < h_values.size(); ++k) {
    if (!(h_values[k] > 0.0))
      throw ParameterError("verify_semiclassics: h must be positive");
    if (k > 0 && !(h_values[k] < h_values[k - 1]))
      throw ParameterError("verify_semiclassics: h values must descend");
  }
  SemiclassicsRun run;
  run.weyl = opts.weyl ? *opts.weyl : weyl_integral(V);
  run.reports.resize(h_values.size());
  parallel_for(h_values.size(), [&](std::size_t k) {
    const double h = h_values[k];
    auto& rep = run.reports[k];
    rep.h = h;
    if (opts.exact_trace) {
      rep.numeric_trace = opts.exact_trace(h);
    } else {
      const auto trace = neg_eigenvalue_sum(V.function(), h, opts.spectral);
      rep.numeric_trace = trace.sum;
      rep.error_estimate = trace.error_estimate;
    }
    rep.formula_value = two_term_formula(V.certificate().kappa, run.weyl, h);
    rep.residual = rep.numeric_trace - rep.formula_value;
    rep.scaled_residual = h * h * rep.residual;
  });
  run.decreasing = run.weakly_decreasing = true;
  for (std::size_t k = 1; k < run.reports.size(); ++k) {
    const double prev = std::abs(run.reports[k - 1].scaled_residual);
    const double cur = std::abs(run.reports[k].scaled_residual);
    run.decreasing &= cur < prev;
    run.weakly_decreasing &= cur <= 1.1 * prev;
  }
  return run;
}

void to_json(nlohmann::json& j, const SemiclassicsReport& r) {
  j = nlohmann::json{{"h", r.h},
                     {"numeric_trace", r.numeric_trace},
                     {"formula_value", r.formula_value},
                     {"residual", r.residual},
                     {"scaled_residual", r.scaled_residual},
                     {"error_estimate", r.error_estimate}};
}

void write_semiclassics_csv(std::ostream& out, const SemiclassicsRun& run) {
  out << "h,numeric,formula,residual,scaled_residual\n";
  out << std::setprecision(17);
  for (const auto& r : run.reports)
    out << r.h << ',' << r.numeric_trace << ',' << r.formula_value << ','
        << r.residual << ',' << r.scaled_residual << '\n';
}

}  // namespace tf2d
