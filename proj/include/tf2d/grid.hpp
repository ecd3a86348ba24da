#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

namespace tf2d {

/// Geometric radial grid with quadrature weights for the 2D radial measure.
///
/// Nodes r_0 < ... < r_{n-1} = r_max are equally spaced in u = ln r. The
/// weights satisfy sum_i w_i f(r_i) ~ int_{r_0}^{r_max} f(r) 2 pi r dr. They
/// are the trapezoid rule in u with end corrections that make the rule exact
/// for f in {r^-2, r^-1, 1, r}; for f r^2 decaying at both ends of the grid
/// the rule converges geometrically in n.
///
/// The cell [0, r_0] is not covered by the weights. Callers that need it use
/// integrate_with_core(), which assumes f(r) r is constant on that cell. This
/// holds for densities behaving like 1/(2 pi r) at the origin.
///
/// Immutable after construction.
class RadialGrid {
 public:
  /// Validates the invariants (ascending positive nodes, last node == r_max,
  /// positive finite weights). Detects geometric spacing; range_weights() is
  /// unavailable for grids that are not geometric.
  RadialGrid(std::vector<double> nodes, std::vector<double> weights,
             double r_max);

  std::size_t size() const { return nodes_.size(); }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  double r_min() const { return nodes_.front(); }
  double r_max() const { return r_max_; }
  /// Spacing in ln r, or 0 if the nodes are not geometric.
  double log_step() const { return log_step_; }
  bool is_geometric() const { return log_step_ > 0.0; }

  /// Weights of the same rule restricted to the node range [first, last],
  /// returned as a full-length vector (zero outside the range).
  std::vector<double> range_weights(std::size_t first, std::size_t last) const;

  /// Index of the node equal to r (relative tolerance 1e-12), or -1.
  long find_node(double r) const;

  /// Index i with r_i <= r < r_{i+1}, clamped to [0, n-2].
  std::size_t bracket(double r) const;

  /// Local cubic interpolation in u = ln r; r is clamped to [r_min, r_max].
  double interpolate(std::span<const double> values, double r) const;

  /// int_{r_lo}^{r_max} f 2 pi r dr for arbitrary r_lo inside the grid. The
  /// partial cell below the first node >= r_lo uses interpolated values.
  double integrate_from(std::span<const double> values, double r_lo) const;

  /// 2 pi r_0^2 f_0: the integral over [0, r_0] assuming f(r) r is constant.
  double core_integral(double first_value) const;

  bool operator==(const RadialGrid& other) const = default;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  double r_max_ = 0.0;
  double log_step_ = 0.0;
};

/// Log-spaced grid with n nodes on [r_min, r_max].
RadialGrid make_log_grid(std::size_t n, double r_min, double r_max);

/// Like make_log_grid, but lowers r_min slightly (by at most one log step)
/// so that `anchor` is exactly a node. Used where an integrand has a kink.
RadialGrid make_log_grid_through(std::size_t n, double r_min, double r_max,
                                 double anchor);

/// sum_i w_i values_i.
double integrate(const RadialGrid& grid, std::span<const double> values);

/// integrate() plus core_integral(values[0]).
double integrate_with_core(const RadialGrid& grid,
                           std::span<const double> values);

void to_json(nlohmann::json& j, const RadialGrid& grid);
RadialGrid grid_from_json(const nlohmann::json& j);

}  // namespace tf2d
