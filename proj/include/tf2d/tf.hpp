#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tf2d/coulomb.hpp"

namespace tf2d {

enum class TFMethod {
  /// Semismooth Newton on the TF equation: solve the linear system on the
  /// current support (bordered with mu when the mass constraint binds), then
  /// update the support from the sign of the TF potential.
  active_set,
  /// Damped fixed-point iteration rho <- (1-t) rho + t [V]_+/(2 pi) at fixed
  /// mu, with bisection on mu for the mass. Slow; kept for cross-checks on
  /// small grids.
  damped,
};

struct TFOptions {
  TFMethod method = TFMethod::active_set;
  double tolerance = 1e-9;      ///< sup-norm TF residual required
  std::size_t max_iterations = 200;
  double mixing = 0.3;          ///< initial damping t (damped method)
  std::size_t max_inner = 20000;  ///< fixed-point steps per mu (damped)
  /// Start density on the solver grid; default lambda-normalized e^-r.
  std::optional<std::vector<double>> initial;
};

struct TFSolution {
  double lambda = 0.0;
  RadialDensity density;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  std::vector<double> potential;  ///< (rho * |x|^-1) at the nodes
  /// Zero of the TF potential past the last occupied node, if the density
  /// vanishes before r_max.
  std::optional<double> support_radius;
  std::vector<std::string> warnings;
};

/// Log grid through r = 1 (the kink of [1/r - 1]_+), as used by the solver.
GridPtr make_tf_grid(std::size_t n, double r_min, double r_max);

/// E^TF(rho) in the regrouped form
///   int_{|x|<r_max} pi (rho - 1/(2 pi |x|))^2 - (1/2) ln r_max + D(rho) - 3/4,
/// equal to the split form at |x| = 1 because int_{1<|x|<r_max} 1/(4 pi |x|^2)
/// = (1/2) ln r_max. Uses the mass weights, so its gradient is the TF
/// equation residual. Requires r_max > 1.
double tf_functional(const RadialDensity& rho);

/// The defining form int (pi rho^2 - rho/|x| + (4 pi)^-1 [|x|^-1 - 1]_+^2)
/// + D(rho), with the grid split at the node r = 1.
double tf_functional_raw(const RadialDensity& rho);

/// Minimizer of the TF functional under int rho <= lambda on `grid`.
/// Throws ParameterError for lambda <= 0, ConvergenceError on failure.
TFSolution tf_solve(double lambda, const GridPtr& grid,
                    const TFOptions& opts = {});

/// sup_i |2 pi rho_i - [1/r_i - Phi_i - mu]_+|.
double tf_residual(const RadialDensity& rho, double mu,
                   const std::vector<double>& potential);

struct EnergyCurve {
  std::vector<TFSolution> solutions;  ///< ascending lambda
  bool decreasing = false;  ///< strictly, over lambda <= 1
  bool convex = false;      ///< second divided differences > 0, lambda <= 1
  bool flat = false;        ///< |E(lambda) - E(1)| <= flat_tolerance, lambda >= 1
};

/// Solves at each lambda (ascending, positive) on one grid and checks the
/// shape of lambda -> E^TF(lambda).
EnergyCurve tf_energy_curve(const std::vector<double>& lambdas,
                            const GridPtr& grid, const TFOptions& opts = {},
                            double flat_tolerance = 1e-6);

/// g(r) = int_{|y|>=r} (1 - r/|y|) rho(y) dy; g(0) = mass, 0 for r >= r_max.
double tail_function_g(const RadialDensity& rho, double r);

/// int_{|y|>=r_i} rho on the grid nodes.
std::vector<double> tail_mass(const RadialDensity& rho);

struct NeutralTailReport {
  double cutoff = 0.0;  ///< checked nodes satisfy r <= cutoff = r_max/2
  std::size_t checked = 0;
  double min_tail_margin = 0.0;   ///< min int_{>=r} rho - e^{-2 sqrt r}
  double min_g_margin = 0.0;      ///< min g(r) - e^{-2 sqrt r}
  double min_second_margin = 0.0; ///< min g(r) - r 2 pi rho(r)
  double tail_beyond_one = 0.0;   ///< int_{|x|>=1} rho
  std::size_t tail_violations = 0;
  std::size_t g_violations = 0;
  std::size_t second_violations = 0;
  bool ok() const {
    return tail_violations == 0 && g_violations == 0 && second_violations == 0;
  }
};

/// Lower bounds on the tail of a neutral solution at nodes r <= r_max/2.
/// ParameterError if lambda < 1.
NeutralTailReport check_neutral_tail(const TFSolution& sol);

/// V^TF(r) = 1/r - Phi(r) - mu. Phi is interpolated (cubic in ln r) between
/// nodes, held at Phi(r_min) below r_min and continued as mass/r past r_max.
double tf_potential(const TFSolution& sol, double r);

/// -(4 pi)^-1 int ([V]_+^2 - [1/r - 1]_+^2) - mu lambda - D(rho), which equals
/// E^TF(lambda) at the minimizer.
double tf_energy_identity(const TFSolution& sol);

/// {"lambda", "mu", "energy", "mass", "residual", "support_radius"}.
void to_json(nlohmann::json& j, const TFSolution& sol);

}  // namespace tf2d
