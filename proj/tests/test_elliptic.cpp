#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "tf2d/elliptic.hpp"
#include "tf2d/errors.hpp"

constexpr double kPi = std::numbers::pi;

namespace {

double K_by_quadrature(double k) {
  auto f = [k](double t) {
    const double s = std::sin(t);
    return 1.0 / std::sqrt(1.0 - k * k * s * s);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, kPi / 2, 30, 1e-14);
}

double kernel_by_quadrature(double r, double s) {
  auto f = [r, s](double t) {
    return 1.0 / std::sqrt(r * r + s * s - 2.0 * r * s * std::cos(t));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, 2.0 * kPi, 30, 1e-14);
}

}  // namespace

TEST_CASE("K at zero and against quadrature") {
  CHECK(tf2d::ellint_K(0.0) == doctest::Approx(kPi / 2).epsilon(1e-15));
  for (double k : {0.1, 0.5, 0.9, 0.999})
    CHECK(std::abs(tf2d::ellint_K(k) - K_by_quadrature(k)) <
          1e-9 * K_by_quadrature(k));
}

TEST_CASE("K logarithmic asymptote") {
  double prev = 1.0;
  for (double e : {1e-3, 1e-4, 1e-5}) {
    const double k = 1.0 - e;
    const double gap =
        std::abs(tf2d::ellint_K(k) - 0.5 * std::abs(std::log(e)) -
                 1.5 * std::log(2.0));
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("K is monotone increasing") {
  double prev = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double v = tf2d::ellint_K(i / 1000.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("K domain") {
  CHECK_THROWS_AS(tf2d::ellint_K(1.0), tf2d::DomainError);
  CHECK_THROWS_AS(tf2d::ellint_K(-0.1), tf2d::DomainError);
}

TEST_CASE("half integral closed form") {
  CHECK(tf2d::half_integral_closed_form(0.25) ==
        doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-14));
  CHECK(tf2d::half_integral_closed_form(0.81) ==
        doctest::Approx(std::log(19.0) / 0.9).epsilon(1e-14));
  CHECK(std::abs(tf2d::half_integral_closed_form(1e-12) - 2.0) < 1e-9);
  CHECK_THROWS_AS(tf2d::half_integral_closed_form(0.0), tf2d::DomainError);
  CHECK_THROWS_AS(tf2d::half_integral_closed_form(1.0), tf2d::DomainError);

  boost::math::quadrature::tanh_sinh<double> ts;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 20; ++i) {
    const double k = u(rng);
    auto f = [k](double t, double tc) {
      // tc = 1 - t near the right endpoint
      const double one_minus_t = t > 0.5 ? tc : 1.0 - t;
      return 1.0 / std::sqrt(one_minus_t * (1.0 - k * t));
    };
    const double q = ts.integrate(f, 0.0, 1.0);
    CHECK(std::abs(tf2d::half_integral_closed_form(k) - q) < 1e-9);
  }
}

TEST_CASE("angular kernel values") {
  CHECK(tf2d::angular_kernel(1.0, 1e-9) == doctest::Approx(2.0 * kPi));
  const double v = tf2d::angular_kernel(2.0, 1.0);
  CHECK(std::abs(v - kernel_by_quadrature(2.0, 1.0)) < 1e-9);
  CHECK(std::abs(v - 4.0 / 3.0 * tf2d::ellint_K(2.0 * std::sqrt(2.0) / 3.0)) <
        1e-12);
  CHECK_THROWS_AS(tf2d::angular_kernel(1.0, 1.0), tf2d::SingularityError);
  CHECK_THROWS_AS(tf2d::angular_kernel(0.0, 1.0), tf2d::DomainError);
  CHECK_THROWS_AS(tf2d::angular_kernel(1.0, -2.0), tf2d::DomainError);
}

TEST_CASE("angular kernel symmetry and bounds") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-6.0, 3.0);
  // Frozen constant: sup of kernel * max / (1 + |ln(1 - t)|) is attained at t = 0.
  const double C = 2.0 * kPi;
  for (int i = 0; i < 100; ++i) {
    const double r = std::exp(u(rng)), s = std::exp(u(rng));
    const double a = tf2d::angular_kernel(r, s);
    CHECK(a == tf2d::angular_kernel(s, r));
    const double hi = std::max(r, s);
    CHECK(a * hi >= 2.0 * kPi * (1.0 - 1e-14));
    const double t = std::min(r, s) / hi;
    CHECK(a * hi <= C * (1.0 + std::abs(std::log1p(-t))) * (1.0 + 1e-14));
  }
}
