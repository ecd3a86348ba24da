#include "tf2d/coulomb.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <list>
#include <mutex>
#include <numbers>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tf2d/elliptic.hpp"
#include "tf2d/errors.hpp"
#include "tf2d/parallel.hpp"

namespace tf2d {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kLn2 = std::log(2.0);

// ln((1 + sigma)/|1 - sigma|), sigma = sqrt(s/r).
double log_ratio(double sigma) {
  return sigma < 1.0 ? 2.0 * std::atanh(sigma) : 2.0 * std::atanh(1.0 / sigma);
}

// int_0^sigma L
double model_primitive0(double sigma) {
  if (sigma == 0.0) return 0.0;
  if (sigma > 0.5 && sigma < 2.0) {
    const double d = std::abs(1.0 - sigma);
    return (1.0 + sigma) * std::log1p(sigma) +
           (d > 0.0 ? (1.0 - sigma) * std::log(d) : 0.0);
  }
  const double q = sigma < 1.0 ? std::log1p(-sigma * sigma)
                               : std::log((sigma - 1.0) * (sigma + 1.0));
  return sigma * log_ratio(sigma) + q;
}

// int_0^sigma t^2 L(t) dt
double model_primitive2(double sigma) {
  if (sigma == 0.0) return 0.0;
  const double s2 = sigma * sigma, s3 = s2 * sigma;
  if (sigma > 0.5 && sigma < 2.0) {
    const double d = std::abs(1.0 - sigma);
    return ((1.0 + s3) * std::log1p(sigma) +
            (d > 0.0 ? (1.0 - s3) * std::log(d) : 0.0) + s2) /
           3.0;
  }
  const double q = sigma < 1.0 ? std::log1p(-s2)
                               : std::log((sigma - 1.0) * (sigma + 1.0));
  return (s3 * log_ratio(sigma) + q + s2) / 3.0;
}

// K(r, s) minus the singular model 2 L / sqrt(rs); bounded.
double kernel_remainder(double r, double s) {
  if (std::abs(s - r) < 1e-12 * r) return 2.0 * kLn2 / r;
  const double sigma = std::sqrt(s / r);
  // Near the diagonal take |sqrt r - sqrt s| from the exact difference r - s.
  const double L =
      sigma > 0.5 && sigma < 2.0
          ? 2.0 * std::log(std::sqrt(r) + std::sqrt(s)) - std::log(std::abs(r - s))
          : log_ratio(sigma);
  return angular_kernel(r, s) - 2.0 * L / std::sqrt(r * s);
}

// Adaptive Gauss-Kronrod on [a, b], mapped to [0, 1] (Boost's error
// estimate misbehaves on very short intervals).
template <class F>
double gk(F f, double a, double b) {
  if (!(b > a)) return 0.0;
  const double w = b - a;
  auto g = [&](double x) { return f(a + w * x); };
  return w * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                 g, 0.0, 1.0, 15, 1e-12);
}

// int_{a}^{b} (K - model)(r, s) s ds in t = ln s, split at s = r.
double remainder_moment(double r, double a, double b) {
  auto f = [r](double t) {
    const double s = std::exp(t);
    return kernel_remainder(r, s) * s * s;
  };
  const double ta = std::log(a), tb = std::log(b), tr = std::log(r);
  if (tr <= ta || tr >= tb) return gk(f, ta, tb);
  return gk(f, ta, tr) + gk(f, tr, tb);
}

double remainder_core(double r, double c) {
  auto f = [r](double s) { return kernel_remainder(r, s); };
  if (r >= c) return gk(f, 0.0, c);
  return gk(f, 0.0, r) + gk(f, r, c);
}

bool same_grid(const RadialDensity& f, const RadialDensity& g) {
  return f.grid_ptr() == g.grid_ptr() || f.grid() == g.grid();
}

double potential_at(const RadialGrid& g, std::span<const double> rho,
                    double r) {
  if (rho.size() != g.size())
    throw ParameterError("coulomb potential: length mismatch");
  if (!(r >= g.r_min() * (1.0 - 1e-12) && r <= g.r_max() * (1.0 + 1e-12)))
    throw DomainError("coulomb potential: r outside [r_min, r_max]");
  r = std::clamp(r, g.r_min(), g.r_max());
  const std::size_t b = g.bracket(r);
  long node = -1;
  if (std::abs(r - g.node(b)) <= 1e-10 * r) node = static_cast<long>(b);
  if (std::abs(r - g.node(b + 1)) <= 1e-10 * r) node = static_cast<long>(b + 1);
  double rho_r;
  if (node >= 0) {
    r = g.node(static_cast<std::size_t>(node));
    rho_r = rho[static_cast<std::size_t>(node)];
  } else {
    rho_r = g.interpolate(rho, r);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (static_cast<long>(j) == node) continue;
    sum += g.weight(j) / kTwoPi * angular_kernel(r, g.node(j)) * (rho[j] - rho_r);
  }
  if (rho_r != 0.0) sum += rho_r * kernel_moment(r, g.r_min(), g.r_max());
  if (rho[0] != 0.0)
    sum += rho[0] * g.r_min() * kernel_core_integral(r, g.r_min());
  return sum;
}

}  // namespace

RadialDensity::RadialDensity(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw ParameterError("RadialDensity: null grid");
  if (values_.size() != grid_->size())
    throw ParameterError("RadialDensity: values length != node count");
  for (double v : values_) {
    if (!std::isfinite(v)) throw NumericError("RadialDensity: non-finite value");
    if (v < 0.0) throw ParameterError("RadialDensity: negative value");
  }
  mass_ = integrate_with_core(*grid_, values_);
}

std::vector<double> mass_weights(const RadialGrid& grid) {
  std::vector<double> w(grid.weights().begin(), grid.weights().end());
  w[0] += grid.core_integral(1.0);
  return w;
}

double kernel_moment(double r, double r_lo, double r_hi) {
  if (!(r > 0.0) || !(r_lo > 0.0) || !(r_hi > r_lo))
    throw DomainError("kernel_moment: need r > 0 and 0 < r_lo < r_hi");
  const double model = 4.0 * r *
                       (model_primitive2(std::sqrt(r_hi / r)) -
                        model_primitive2(std::sqrt(r_lo / r)));
  return model + remainder_moment(r, r_lo, r_hi);
}

double kernel_core_integral(double r, double r_hi) {
  if (!(r > 0.0) || !(r_hi > 0.0))
    throw DomainError("kernel_core_integral: need r > 0 and r_hi > 0");
  return 4.0 * model_primitive0(std::sqrt(r_hi / r)) + remainder_core(r, r_hi);
}

CoulombOperator::CoulombOperator(GridPtr grid)
    : grid_(std::move(grid)), mass_weights_(tf2d::mass_weights(*grid_)) {
  const auto& g = *grid_;
  const std::size_t n = g.size();
  const double r0 = g.r_min();
  matrix_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  // Upper triangle of K first, then the rows.
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j)
      matrix_(i, j) = angular_kernel(g.node(i), g.node(j));
  });
  std::vector<double> moment(n), core(n);
  parallel_for(n, [&](std::size_t i) {
    moment[i] = kernel_moment(g.node(i), r0, g.r_max());
    core[i] = kernel_core_integral(g.node(i), r0);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) matrix_(i, j) = matrix_(j, i);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      matrix_(i, j) *= g.weight(j) / kTwoPi;
      off += matrix_(i, j);
    }
    matrix_(i, i) = moment[i] - off;
    matrix_(i, 0) += r0 * core[i];
  }
}

std::vector<double> CoulombOperator::apply(std::span<const double> rho) const {
  if (rho.size() != grid_->size())
    throw ParameterError("CoulombOperator::apply: length mismatch");
  const Eigen::Map<const Eigen::VectorXd> x(rho.data(),
                                            static_cast<Eigen::Index>(rho.size()));
  const Eigen::VectorXd y = matrix_ * x;
  return std::vector<double>(y.data(), y.data() + y.size());
}

double CoulombOperator::evaluate(std::span<const double> rho, double r) const {
  return potential_at(*grid_, rho, r);
}

std::shared_ptr<const CoulombOperator> coulomb_operator(const GridPtr& grid) {
  static std::mutex mutex;
  static std::list<std::shared_ptr<const CoulombOperator>> cache;
  constexpr std::size_t kCapacity = 6;
  std::lock_guard lock(mutex);
  for (auto it = cache.begin(); it != cache.end(); ++it) {
    if ((*it)->grid_ptr() == grid || (*it)->grid() == *grid) {
      auto op = *it;
      cache.erase(it);
      cache.push_front(op);
      return op;
    }
  }
  auto op = std::make_shared<const CoulombOperator>(grid);
  cache.push_front(op);
  if (cache.size() > kCapacity) cache.pop_back();
  return op;
}

double coulomb_potential(const RadialDensity& rho, double r) {
  return potential_at(rho.grid(), rho.values(), r);
}

std::vector<double> coulomb_potential_nodes(const RadialDensity& rho) {
  return coulomb_operator(rho.grid_ptr())->apply(rho.values());
}

double coulomb_energy(const RadialDensity& f, const RadialDensity& g) {
  if (!same_grid(f, g))
    throw ParameterError("coulomb_energy: densities live on different grids");
  const auto op = coulomb_operator(g.grid_ptr());
  const auto phi = op->apply(g.values());
  const auto mw = op->mass_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) sum += mw[i] * f.value(i) * phi[i];
  return 0.5 * sum;
}

double newton_lower_bound(const RadialDensity& rho, double r) {
  if (!(r > 0.0)) throw DomainError("newton_lower_bound: need r > 0");
  const auto& g = rho.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    sum += g.weight(i) * rho.value(i) / std::max(r, g.node(i));
  // Core cell with rho = q0/s: 2 pi q0 int_0^{r0} ds / max(r, s).
  const double r0 = g.r_min(), q0 = rho.value(0) * r0;
  sum += r >= r0 ? kTwoPi * q0 * r0 / r
                 : kTwoPi * q0 * (1.0 + std::log(r0 / r));
  return sum;
}

UpperBoundReport check_upper_bound(const RadialDensity& rho) {
  const auto& g = rho.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (kTwoPi * rho.value(i) * g.node(i) > 1.0 + 1e-9)
      throw PreconditionError(
          "check_upper_bound: 2 pi rho(r) r > 1 at some node");
  UpperBoundReport rep;
  rep.lambda = rho.mass();
  const auto phi = coulomb_potential_nodes(rho);
  rep.min_slack = INFINITY;
  rep.max_slack = -INFINITY;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double bound =
        2.0 * std::sqrt(2.0 * rep.lambda) / std::sqrt(g.node(i)) + 3.0;
    const double slack = bound - phi[i];
    rep.min_slack = std::min(rep.min_slack, slack);
    rep.max_slack = std::max(rep.max_slack, slack);
    if (slack < 0.0) rep.violations.push_back(i);
  }
  return rep;
}

double hls_ratio(const RadialDensity& f) {
  std::vector<double> p(f.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::pow(f.value(i), 4.0 / 3.0);
  const double norm2 = std::pow(integrate_with_core(f.grid(), p), 1.5);
  if (!(norm2 > 0.0)) throw ParameterError("hls_ratio: zero density");
  return coulomb_energy(f, f) / norm2;
}

void write_density_csv(std::ostream& out, const RadialDensity& rho,
                       std::span<const double> potential) {
  if (potential.size() != rho.size())
    throw ParameterError("write_density_csv: potential length mismatch");
  const auto old = out.precision(17);
  out << "r,rho,potential\n";
  for (std::size_t i = 0; i < rho.size(); ++i)
    out << rho.grid().node(i) << ',' << rho.value(i) << ',' << potential[i]
        << '\n';
  out.precision(old);
}

}  // namespace tf2d
