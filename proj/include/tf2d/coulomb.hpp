#pragma once

#include <cstddef>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tf2d/grid.hpp"

namespace tf2d {

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Nonnegative radial density (per unit area) sampled on a grid.
///
/// The mass includes the core cell [0, r_0] under the model rho(r) r const,
/// i.e. mass = integrate_with_core(grid, values).
class RadialDensity {
 public:
  /// Throws ParameterError on negative or length-mismatched values,
  /// NumericError on non-finite values.
  RadialDensity(GridPtr grid, std::vector<double> values);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double value(std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  double mass() const { return mass_; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
  double mass_ = 0.0;
};

/// Weights m_i with sum_i m_i rho_i = mass of rho (grid weights plus the
/// core cell on node 0).
std::vector<double> mass_weights(const RadialGrid& grid);

/// Discretized Coulomb operator Phi = rho * |x|^-1 on a fixed grid.
///
/// Phi(r) = int_0^inf rho(s) K(r, s) s ds with K the angular kernel. The
/// log singularity at s = r is removed by subtraction:
///   Phi(r) = int K(r,s) (rho(s) - rho(r)) s ds + rho(r) A(r) + q_0 B(r),
/// A(r) = int_{r_0}^{r_max} K(r,s) s ds, B(r) = int_0^{r_0} K(r,s) ds and
/// q_0 = rho_0 r_0 (core model). The first integral has a bounded integrand
/// vanishing at s = r and uses the grid weights.
///
/// A and B are split into a singular model and a bounded remainder. With
/// k = 2 sqrt(rs)/(r+s), the model is 4/(r+s) * (1/2) H(k^2) where
/// H = half_integral_closed_form; it simplifies to 2 L / sqrt(rs) with
/// L = ln((sqrt r + sqrt s)/|sqrt r - sqrt s|). Substituting s = r sigma^2:
///   int model s ds = 4 r int sigma^2 L dsigma,  int model ds = 4 int L dsigma,
/// with antiderivatives
///   int L       = (1+sigma) ln(1+sigma) + (1-sigma) ln|1-sigma|,
///   int s^2 L   = [(1+sigma^3) ln(1+sigma) + (1-sigma^3) ln|1-sigma| + sigma^2]/3.
/// K - model is bounded ((2/r) ln 2 at s = r) and is integrated by adaptive
/// Gauss-Kronrod in ln s, split at s = r.
class CoulombOperator {
 public:
  /// Assembles the node matrix; rows are built in parallel.
  explicit CoulombOperator(GridPtr grid);

  const RadialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  /// Phi_i = sum_j M_ij rho_j at the nodes.
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  std::span<const double> mass_weights() const { return mass_weights_; }

  std::vector<double> apply(std::span<const double> rho) const;

  /// Phi(r) for r in [r_min, r_max] without using the matrix (O(n)).
  double evaluate(std::span<const double> rho, double r) const;

 private:
  GridPtr grid_;
  Eigen::MatrixXd matrix_;
  std::vector<double> mass_weights_;
};

/// Shared operator for a grid, built on first use and cached (small LRU).
std::shared_ptr<const CoulombOperator> coulomb_operator(const GridPtr& grid);

/// int K(r, s) s ds over [r_lo, r_hi], 0 < r_lo < r_hi.
double kernel_moment(double r, double r_lo, double r_hi);
/// int_0^{r_hi} K(r, s) ds.
double kernel_core_integral(double r, double r_hi);

/// (rho * |x|^-1)(r); DomainError unless r in [r_min, r_max].
double coulomb_potential(const RadialDensity& rho, double r);

/// Potential at every grid node (uses the cached operator).
std::vector<double> coulomb_potential_nodes(const RadialDensity& rho);

/// D(f, g) = 1/2 int f (g * |x|^-1). ParameterError if the grids differ.
double coulomb_energy(const RadialDensity& f, const RadialDensity& g);

/// int rho(y) / max(r, |y|) dy, a lower bound for the potential at r > 0.
double newton_lower_bound(const RadialDensity& rho, double r);

struct UpperBoundReport {
  double lambda = 0.0;      ///< mass of the density
  double min_slack = 0.0;   ///< min over nodes of bound - potential
  double max_slack = 0.0;   ///< max over nodes of bound - potential
  std::vector<std::size_t> violations;  ///< nodes where potential > bound
};

/// Checks Phi(r) <= 2 sqrt(2 lambda) r^-1/2 + 3 at every node. Requires
/// 2 pi rho(r) r <= 1 + 1e-9 at every node, else PreconditionError.
UpperBoundReport check_upper_bound(const RadialDensity& rho);

/// D(f) / ||f||_{4/3}^2; bounded above by the HLS constant.
double hls_ratio(const RadialDensity& f);

/// CSV with header "r,rho,potential" and 17 significant digits.
void write_density_csv(std::ostream& out, const RadialDensity& rho,
                       std::span<const double> potential);

}  // namespace tf2d
