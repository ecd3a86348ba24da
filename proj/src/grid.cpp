#include "tf2d/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "tf2d/errors.hpp"

namespace tf2d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Trapezoid error on exp(k u) per unit end value: ((kh/2) coth(kh/2) - 1)/k.
double trapezoid_excess(int k, double h) {
  if (k == 0) return 0.0;
  const double x = 0.5 * k * h;
  const double xc = x < 1e-4 ? x * x / 3.0 - x * x * x * x / 45.0
                             : x / std::tanh(x) - 1.0;
  return xc / k;
}

// Corrections c_j (right end, node b - j h) and d_j (left end, node a + j h)
// that make trapezoid + corrections exact on exp(k u) for k = 0..J-1.
struct EndCorrections {
  std::vector<double> right;
  std::vector<double> left;
};

EndCorrections end_corrections(double h, int terms) {
  Eigen::MatrixXd right(terms, terms), left(terms, terms);
  Eigen::VectorXd rhs_right(terms), rhs_left(terms);
  for (int k = 0; k < terms; ++k) {
    for (int j = 0; j < terms; ++j) {
      right(k, j) = std::exp(-k * j * h);
      left(k, j) = std::exp(k * j * h);
    }
    rhs_right(k) = -trapezoid_excess(k, h);
    rhs_left(k) = trapezoid_excess(k, h);
  }
  const Eigen::VectorXd c = right.fullPivLu().solve(rhs_right);
  const Eigen::VectorXd d = left.fullPivLu().solve(rhs_left);
  return {std::vector<double>(c.data(), c.data() + terms),
          std::vector<double>(d.data(), d.data() + terms)};
}

// Coefficients in u-measure (multiply by 2 pi r^2 for the radial weight) of
// the corrected trapezoid rule over `count` equally spaced nodes.
std::vector<double> log_rule(std::size_t count, double h, int terms) {
  std::vector<double> c(count, 0.0);
  if (count < 2) return c;
  std::fill(c.begin(), c.end(), h);
  c.front() = c.back() = 0.5 * h;
  if (count < static_cast<std::size_t>(2 * terms)) return c;
  const auto corr = end_corrections(h, terms);
  for (int j = 0; j < terms; ++j) {
    c[count - 1 - j] += corr.right[j];
    c[j] += corr.left[j];
  }
  return c;
}

int correction_terms(std::size_t n, double h) {
  // Four terms (exact for r^-2..r) unless that makes a weight nonpositive.
  for (int terms : {4, 3}) {
    const auto c = log_rule(n, h, terms);
    if (std::all_of(c.begin(), c.end(), [](double v) { return v > 0.0; }))
      return terms;
  }
  return 0;
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v))
      throw NumericError(std::string(what) + ": non-finite value");
}

}  // namespace

RadialGrid::RadialGrid(std::vector<double> nodes, std::vector<double> weights,
                       double r_max)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), r_max_(r_max) {
  if (nodes_.size() < 2 || nodes_.size() != weights_.size())
    throw ParameterError("RadialGrid: need >= 2 nodes and matching weights");
  require_finite(nodes_, "RadialGrid nodes");
  require_finite(weights_, "RadialGrid weights");
  if (nodes_.front() <= 0.0)
    throw ParameterError("RadialGrid: nodes must be positive");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw ParameterError("RadialGrid: nodes must be strictly increasing");
  for (double w : weights_)
    if (!(w > 0.0)) throw ParameterError("RadialGrid: weights must be > 0");
  if (std::abs(nodes_.back() - r_max_) > 1e-12 * r_max_)
    throw ParameterError("RadialGrid: last node must equal r_max");

  const double h = std::log(nodes_.back() / nodes_.front()) /
                   static_cast<double>(nodes_.size() - 1);
  bool geometric = true;
  for (std::size_t i = 1; i < nodes_.size() && geometric; ++i)
    geometric = std::abs(std::log(nodes_[i] / nodes_[i - 1]) - h) < 1e-9;
  log_step_ = geometric ? h : 0.0;
}

std::vector<double> RadialGrid::range_weights(std::size_t first,
                                              std::size_t last) const {
  if (!is_geometric())
    throw ParameterError("range_weights: grid is not log-uniform");
  if (first > last || last >= size())
    throw ParameterError("range_weights: invalid node range");
  const std::size_t count = last - first + 1;
  const int terms = correction_terms(size(), log_step_);
  const auto c = log_rule(count, log_step_, terms);
  std::vector<double> w(size(), 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    const double r = nodes_[first + j];
    w[first + j] = kTwoPi * r * r * c[j];
  }
  return w;
}

long RadialGrid::find_node(double r) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(),
                                   r * (1.0 - 1e-12));
  if (it != nodes_.end() && std::abs(*it - r) <= 1e-12 * r)
    return static_cast<long>(it - nodes_.begin());
  return -1;
}

std::size_t RadialGrid::bracket(double r) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  const auto idx = static_cast<long>(it - nodes_.begin()) - 1;
  return static_cast<std::size_t>(
      std::clamp<long>(idx, 0, static_cast<long>(size()) - 2));
}

double RadialGrid::interpolate(std::span<const double> values,
                               double r) const {
  if (values.size() != size())
    throw ParameterError("interpolate: length mismatch");
  r = std::clamp(r, r_min(), r_max_);
  if (size() < 4) {
    const std::size_t i = bracket(r);
    const double t = std::log(r / nodes_[i]) / std::log(nodes_[i + 1] / nodes_[i]);
    return (1.0 - t) * values[i] + t * values[i + 1];
  }
  const std::size_t i = bracket(r);
  const std::size_t j0 = std::min(i > 0 ? i - 1 : 0, size() - 4);
  const double u = std::log(r);
  std::array<double, 4> us{};
  for (int a = 0; a < 4; ++a) us[a] = std::log(nodes_[j0 + a]);
  double result = 0.0;
  for (int a = 0; a < 4; ++a) {
    double basis = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) basis *= (u - us[b]) / (us[a] - us[b]);
    result += basis * values[j0 + a];
  }
  return result;
}

double RadialGrid::integrate_from(std::span<const double> values,
                                  double r_lo) const {
  if (values.size() != size())
    throw ParameterError("integrate_from: length mismatch");
  if (r_lo <= r_min()) return integrate(*this, values);
  if (r_lo >= r_max_) return 0.0;
  const long exact = find_node(r_lo);
  const std::size_t k =
      exact >= 0 ? static_cast<std::size_t>(exact) : bracket(r_lo) + 1;
  const auto w = range_weights(k, size() - 1);
  double total = 0.0;
  for (std::size_t j = k; j < size(); ++j) total += w[j] * values[j];
  if (exact < 0) {
    // Partial cell [r_lo, r_k]: 3-point Gauss-Legendre in u.
    const double ua = std::log(r_lo), ub = std::log(nodes_[k]);
    const double mid = 0.5 * (ua + ub), half = 0.5 * (ub - ua);
    constexpr std::array<double, 3> x{-0.7745966692414834, 0.0,
                                      0.7745966692414834};
    constexpr std::array<double, 3> gw{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (int q = 0; q < 3; ++q) {
      const double r = std::exp(mid + half * x[q]);
      total += half * gw[q] * kTwoPi * r * r * interpolate(values, r);
    }
  }
  return total;
}

double RadialGrid::core_integral(double first_value) const {
  return kTwoPi * nodes_.front() * nodes_.front() * first_value;
}

RadialGrid make_log_grid(std::size_t n, double r_min, double r_max) {
  if (n < 16) throw ParameterError("make_log_grid: n must be >= 16");
  if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
    throw ParameterError("make_log_grid: need 0 < r_min < r_max");
  const double a = std::log(r_min), b = std::log(r_max);
  const double h = (b - a) / static_cast<double>(n - 1);
  std::vector<double> nodes(n);
  for (std::size_t i = 0; i < n; ++i)
    nodes[i] = std::exp(a + h * static_cast<double>(i));
  nodes.front() = r_min;
  nodes.back() = r_max;
  const int terms = correction_terms(n, h);
  if (terms == 0)
    throw ParameterError("make_log_grid: no positive rule for this spacing");
  const auto c = log_rule(n, h, terms);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i)
    weights[i] = kTwoPi * nodes[i] * nodes[i] * c[i];
  return RadialGrid(std::move(nodes), std::move(weights), r_max);
}

RadialGrid make_log_grid_through(std::size_t n, double r_min, double r_max,
                                 double anchor) {
  if (n < 16) throw ParameterError("make_log_grid_through: n must be >= 16");
  if (!(r_min > 0.0) || !(anchor > r_min) || !(r_max > anchor))
    throw ParameterError("make_log_grid_through: need 0 < r_min < anchor < r_max");
  // With u_i = a + i h and b = ln r_max fixed, pick the index i_a of the
  // anchor and solve a + i_a (b - a)/(n - 1) = ln(anchor) for a.
  const double a0 = std::log(r_min), b = std::log(r_max), ua = std::log(anchor);
  const double frac = (ua - a0) / (b - a0) * static_cast<double>(n - 1);
  const double ia = std::ceil(frac);
  const double a = (ua * static_cast<double>(n - 1) - ia * b) /
                   (static_cast<double>(n - 1) - ia);
  auto grid = make_log_grid(n, std::exp(a), r_max);
  const auto i = static_cast<std::size_t>(ia);
  std::vector<double> nodes(grid.nodes().begin(), grid.nodes().end());
  std::vector<double> weights(grid.weights().begin(), grid.weights().end());
  // Snap the anchor node; the weight changes by O(1 ulp).
  weights[i] *= (anchor / nodes[i]) * (anchor / nodes[i]);
  nodes[i] = anchor;
  return RadialGrid(std::move(nodes), std::move(weights), r_max);
}

double integrate(const RadialGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size())
    throw ParameterError("integrate: values length != node count");
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) throw NumericError("integrate: NaN in values");
    total += grid.weight(i) * values[i];
  }
  if (!std::isfinite(total)) throw NumericError("integrate: non-finite sum");
  return total;
}

double integrate_with_core(const RadialGrid& grid,
                           std::span<const double> values) {
  return integrate(grid, values) + grid.core_integral(values[0]);
}

void to_json(nlohmann::json& j, const RadialGrid& grid) {
  j = nlohmann::json{
      {"nodes", std::vector<double>(grid.nodes().begin(), grid.nodes().end())},
      {"weights",
       std::vector<double>(grid.weights().begin(), grid.weights().end())},
      {"r_max", grid.r_max()}};
}

RadialGrid grid_from_json(const nlohmann::json& j) {
  try {
    return RadialGrid(j.at("nodes").get<std::vector<double>>(),
                      j.at("weights").get<std::vector<double>>(),
                      j.at("r_max").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("grid JSON: ") + e.what());
  }
}

}  // namespace tf2d
