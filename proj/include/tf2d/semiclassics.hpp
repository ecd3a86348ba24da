#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "tf2d/grid.hpp"
#include "tf2d/spectral.hpp"
#include "tf2d/tf.hpp"

namespace tf2d {

/// |V(r) - kappa/r| <= C r^-theta for 0 < r <= delta.
struct SingularityCertificate {
  double kappa = 1.0;
  double theta = 0.5;  ///< in (0, 1)
  double C = 1.0;
  double delta = 1.0;
};

/// Radial potential with a Coulomb singularity of strength kappa at 0.
class SingularPotential {
 public:
  /// ParameterError on invalid certificate parameters; CertificateError if
  /// the bound fails at one of the sampled radii in (0, delta].
  SingularPotential(RadialPotential V, SingularityCertificate cert);

  double operator()(double r) const { return V_(r); }
  const RadialPotential& function() const { return V_; }
  const SingularityCertificate& certificate() const { return cert_; }

 private:
  RadialPotential V_;
  SingularityCertificate cert_;
};

/// kappa/r - mu.
SingularPotential shifted_coulomb_potential(double mu, double kappa = 1.0);
/// V^TF of a converged solution (kappa = 1, theta = 1/2, delta = 1,
/// C = 1.01 (Phi(r_min) + mu)). The solution is copied.
SingularPotential tf_singular_potential(const TFSolution& sol);

/// int_{R^2} ([V]_+^2 - kappa^2 [1/r - 1]_+^2) dx as one radial integral:
/// 8-point Gauss-Legendre in ln r on each cell of `grid`, cells split at
/// r = 1 and at sign changes of V, plus the core [0, r_min] under a power
/// law fitted on the first two nodes. CertificateError if the integrand
/// does not cancel near 0.
double weyl_integral(const SingularPotential& V, const RadialGrid& grid);
/// Same on the default log grid (4000 nodes on [1e-8, 1e4]).
double weyl_integral(const SingularPotential& V);

/// -(8 pi h^2)^-1 weyl + kappa^2 (4 h^2)^-1 (ln(2 h^2 / kappa) + c_H).
double two_term_formula(double kappa, double weyl, double h);
double two_term_formula(const SingularPotential& V, double h);

struct SemiclassicsReport {
  double h = 0.0;
  double numeric_trace = 0.0;
  double formula_value = 0.0;
  double residual = 0.0;         ///< numeric - formula
  double scaled_residual = 0.0;  ///< h^2 residual
  double error_estimate = 0.0;   ///< of the numeric trace
};

struct SemiclassicsOptions {
  SpectralOptions spectral;
  /// Replaces the spectral computation of Tr[-h^2 Delta - V]_- when set.
  std::function<double(double)> exact_trace;
  std::optional<double> weyl;  ///< precomputed weyl_integral
};

struct SemiclassicsRun {
  double weyl = 0.0;
  std::vector<SemiclassicsReport> reports;  ///< in the order of h_values
  bool decreasing = false;        ///< |scaled_residual| strictly decreasing
  bool weakly_decreasing = false; ///< each step grows by at most 10%
};

/// Compares the negative-eigenvalue sum with the two-term formula at each h
/// (strictly descending, positive).
SemiclassicsRun verify_semiclassics(const SingularPotential& V,
                                    const std::vector<double>& h_values,
                                    const SemiclassicsOptions& opts = {});

void to_json(nlohmann::json& j, const SemiclassicsReport& r);
/// Columns h,numeric,formula,residual,scaled_residual; 17 digits.
void write_semiclassics_csv(std::ostream& out, const SemiclassicsRun& run);

}  // namespace tf2d
