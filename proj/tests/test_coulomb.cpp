#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "tf2d/coulomb.hpp"
#include "tf2d/elliptic.hpp"
#include "tf2d/errors.hpp"

using tf2d::GridPtr;
using tf2d::RadialDensity;
constexpr double kPi = std::numbers::pi;

namespace {

template <class F>
double gk(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 12, 1e-13);
}

// Potential of the unit-density disk of radius 1 at distance r, by summing
// chord lengths over directions from the field point.
double unit_disk_potential(double r) {
  if (r < 1.0)
    return gk([r](double p) {
      const double sn = std::sin(p);
      return std::sqrt(1.0 - r * r * sn * sn);
    }, 0.0, 2.0 * kPi);
  const double pmax = std::asin(1.0 / r);
  return gk([r](double p) {
    const double sn = std::sin(p);
    return 2.0 * std::sqrt(std::max(0.0, 1.0 - r * r * sn * sn));
  }, -pmax, pmax);
}

GridPtr grid_through_one(std::size_t n, double r_min, double r_max) {
  return std::make_shared<const tf2d::RadialGrid>(
      tf2d::make_log_grid_through(n, r_min, r_max, 1.0));
}

// Uniform unit-mass disk of radius 1, midpoint value at the edge node.
RadialDensity unit_disk(const GridPtr& g) {
  std::vector<double> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = g->node(i);
    v[i] = r < 1.0 ? 1.0 / kPi : (r == 1.0 ? 0.5 / kPi : 0.0);
  }
  return RadialDensity(g, std::move(v));
}

RadialDensity random_density(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double amp = 0.05 + 0.9 * u(rng), scale = 0.3 + 3.0 * u(rng);
  const double bump = u(rng), center = 0.5 + 4.0 * u(rng);
  std::vector<double> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = g->node(i);
    const double shape =
        amp * std::exp(-r / scale) +
        bump * std::exp(-(r - center) * (r - center));
    v[i] = std::min(shape, 1.0) / (2.0 * kPi * std::max(r, 1.0));
  }
  return RadialDensity(g, std::move(v));
}

}  // namespace

TEST_CASE("density validation and mass") {
  auto g = grid_through_one(200, 1e-6, 3.0);
  CHECK_THROWS_AS(RadialDensity(g, std::vector<double>(199, 0.0)),
                  tf2d::ParameterError);
  std::vector<double> neg(200, 0.0);
  neg[3] = -1.0;
  CHECK_THROWS_AS(RadialDensity(g, neg), tf2d::ParameterError);
  std::vector<double> inv(200);
  for (std::size_t i = 0; i < inv.size(); ++i)
    inv[i] = 1.0 / (2.0 * kPi * g->node(i));
  CHECK(RadialDensity(g, inv).mass() == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("kernel moments reproduce the uniform disk potential") {
  for (double r : {1e-4, 0.1, 0.5, 0.9, 0.999, 1.001, 1.5, 4.0}) {
    const double m = tf2d::kernel_moment(r, 1e-9, 1.0);
    CHECK(std::abs(m - unit_disk_potential(r)) < 1e-10);
  }
  // Core integral against direct quadrature away from the singularity.
  const double r = 2.0, c = 0.5;
  const double direct =
      gk([r](double s) { return tf2d::angular_kernel(r, s); }, 0.0, c);
  CHECK(std::abs(tf2d::kernel_core_integral(r, c) - direct) < 1e-12);
}

TEST_CASE("uniform disk potential at the centre is 2") {
  // The jump at r = 1 limits the rule to O(h^2).
  auto g = grid_through_one(600, 1e-6, 2.0);
  const auto disk = unit_disk(g);
  CHECK(std::abs(disk.mass() - 1.0) < 1e-3);
  const double centre = tf2d::coulomb_potential(disk, g->r_min());
  CHECK(std::abs(centre - 2.0) < 1e-3);
  const auto nodes = tf2d::coulomb_potential_nodes(disk);
  CHECK(std::abs(nodes[0] - centre) < 1e-12);
  for (double r : {0.3, 0.8, 1.7}) {
    const double exact = unit_disk_potential(r) / kPi;
    CHECK(std::abs(tf2d::coulomb_potential(disk, r) - exact) < 1e-3);
  }
  const auto fine = unit_disk(grid_through_one(2400, 1e-6, 2.0));
  const double fine_err =
      std::abs(tf2d::coulomb_potential(fine, fine.grid().r_min()) - 2.0);
  CHECK(fine_err < std::abs(centre - 2.0) / 10.0);
}

TEST_CASE("far field of a concentrated density is monopole") {
  auto g = std::make_shared<const tf2d::RadialGrid>(
      tf2d::make_log_grid(400, 1e-6, 20.0));
  const double eps = 0.01, lambda = 0.7;
  std::vector<double> v(g->size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (g->node(i) <= eps) v[i] = 1.0;
  RadialDensity raw(g, v);
  for (double& x : v) x *= lambda / raw.mass();
  RadialDensity rho(g, v);
  for (double r : {1.0, 5.0, 19.0})
    CHECK(std::abs(tf2d::coulomb_potential(rho, r) * r / lambda - 1.0) <
          (eps / r) * (eps / r));
}

TEST_CASE("TF-like annulus matches brute-force 2D quadrature") {
  // rho = 1/(2 pi s) on [a, b]; potential at r > b.
  const double a = 0.25, b = 1.0;
  auto g = grid_through_one(6000, 1e-6, 4.0);
  std::vector<double> v(g->size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = g->node(i);
    if (s > a && s < b) v[i] = 1.0 / (2.0 * kPi * s);
    if (s == b) v[i] = 0.5 / (2.0 * kPi * s);
  }
  // a is not a node: the half value puts the left edge at the next node.
  const std::size_t ia = g->bracket(a) + 1;
  v[ia] *= 0.5;
  const double a_eff = g->node(ia);
  RadialDensity rho(g, v);
  for (double r : {1.5, 3.0}) {
    const double oracle = gk([r](double s) {
      return gk([r, s](double t) {
        return 1.0 / (2.0 * kPi *
                      std::sqrt(r * r + s * s - 2.0 * r * s * std::cos(t)));
      }, 0.0, 2.0 * kPi);
    }, a_eff, b);
    CHECK(std::abs(tf2d::coulomb_potential(rho, r) - oracle) < 1e-6);
  }
}

TEST_CASE("Coulomb energy of the uniform disk") {
  // D = 1/2 int rho Phi with Phi from the chord-sum oracle.
  const double oracle =
      0.5 * gk([](double r) {
        return (1.0 / kPi) * (unit_disk_potential(r) / kPi) * 2.0 * kPi * r;
      }, 0.0, 1.0);
  CHECK(std::abs(oracle - 8.0 / (3.0 * kPi)) < 1e-10);
  auto g = grid_through_one(800, 1e-6, 2.0);
  const auto disk = unit_disk(g);
  CHECK(std::abs(tf2d::coulomb_energy(disk, disk) - oracle) < 1e-4);
}

TEST_CASE("Coulomb energy symmetry, positivity and scaling") {
  auto g = grid_through_one(240, 1e-6, 20.0);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 5; ++k) {
    const auto f = random_density(g, rng), h = random_density(g, rng);
    const double fh = tf2d::coulomb_energy(f, h), hf = tf2d::coulomb_energy(h, f);
    CHECK(std::abs(fh - hf) < 1e-9 * std::abs(fh));
    const double ff = tf2d::coulomb_energy(f, f);
    CHECK(ff > 0.0);
    std::vector<double> scaled(f.values().begin(), f.values().end());
    for (double& x : scaled) x *= 3.0;
    CHECK(tf2d::coulomb_energy(RadialDensity(g, scaled), RadialDensity(g, scaled)) ==
          doctest::Approx(9.0 * ff).epsilon(1e-12));
    // Linearity of the potential.
    std::vector<double> comb(g->size());
    for (std::size_t i = 0; i < comb.size(); ++i)
      comb[i] = 2.0 * f.value(i) + 0.5 * h.value(i);
    const auto pc = tf2d::coulomb_potential_nodes(RadialDensity(g, comb));
    const auto pf = tf2d::coulomb_potential_nodes(f);
    const auto ph = tf2d::coulomb_potential_nodes(h);
    for (std::size_t i = 0; i < pc.size(); ++i)
      CHECK(std::abs(pc[i] - 2.0 * pf[i] - 0.5 * ph[i]) <= 1e-10 * std::abs(pc[i]));
    CHECK(tf2d::hls_ratio(f) < 10.0);
  }
  auto other = grid_through_one(100, 1e-6, 20.0);
  CHECK_THROWS_AS(
      tf2d::coulomb_energy(random_density(g, rng), random_density(other, rng)),
      tf2d::ParameterError);
}

TEST_CASE("Newton lower bound") {
  auto g = grid_through_one(300, 1e-6, 20.0);
  // All mass on the first node.
  std::vector<double> point(g->size(), 0.0);
  const auto mw = tf2d::mass_weights(*g);
  point[0] = 0.8 / mw[0];
  // The core model puts part of node 0's mass below r_0; both pieces are
  // inside every r >= r_0.
  RadialDensity pt(g, point);
  CHECK(pt.mass() == doctest::Approx(0.8).epsilon(1e-12));
  for (double r : {1e-3, 1.0, 7.0})
    CHECK(tf2d::newton_lower_bound(pt, r) == doctest::Approx(0.8 / r).epsilon(1e-12));
  const auto disk = unit_disk(grid_through_one(600, 1e-6, 3.0));
  CHECK(std::abs(tf2d::newton_lower_bound(disk, 2.0) - 0.5) < 1e-3);

  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto rho = random_density(g, rng);
    const auto phi = tf2d::coulomb_potential_nodes(rho);
    int violations = 0;
    for (std::size_t i = 0; i < g->size(); ++i)
      if (tf2d::newton_lower_bound(rho, g->node(i)) > phi[i]) ++violations;
    CHECK(violations == 0);
  }
}

TEST_CASE("explicit upper bound") {
  auto g = grid_through_one(300, 1e-6, 20.0);
  std::vector<double> v(g->size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = g->node(i);
    if (r >= 0.1 && r <= 1.0) v[i] = 1.0 / (2.0 * kPi * r);
  }
  const auto rep = tf2d::check_upper_bound(RadialDensity(g, v));
  CHECK(rep.violations.empty());
  CHECK(rep.min_slack > 0.0);

  const auto zero = tf2d::check_upper_bound(
      RadialDensity(g, std::vector<double>(g->size(), 0.0)));
  CHECK(zero.violations.empty());
  CHECK(zero.min_slack == 3.0);
  CHECK(zero.max_slack == 3.0);

  std::vector<double> too_big(g->size(), 0.0);
  too_big[50] = 1.1 / (2.0 * kPi * g->node(50));
  CHECK_THROWS_AS(tf2d::check_upper_bound(RadialDensity(g, too_big)),
                  tf2d::PreconditionError);

  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k)
    CHECK(tf2d::check_upper_bound(random_density(g, rng)).violations.empty());
}

TEST_CASE("potential domain and CSV export") {
  auto g = grid_through_one(100, 1e-3, 5.0);
  RadialDensity rho(g, std::vector<double>(g->size(), 0.1));
  CHECK_THROWS_AS(tf2d::coulomb_potential(rho, 1e-4), tf2d::DomainError);
  CHECK_THROWS_AS(tf2d::coulomb_potential(rho, 6.0), tf2d::DomainError);
  std::ostringstream out;
  tf2d::write_density_csv(out, rho, tf2d::coulomb_potential_nodes(rho));
  const auto text = out.str();
  CHECK(text.rfind("r,rho,potential\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 101);
}
