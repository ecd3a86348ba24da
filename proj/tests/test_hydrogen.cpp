#include <doctest.h>

#include <cmath>

#include "tf2d/errors.hpp"
#include "tf2d/hydrogen.hpp"

using namespace tf2d;

namespace {

double level_sum_oracle(double mu) {
  // Direct (2n+1)(E_n + mu) over a fixed long range, keeping negatives.
  double s = 0.0;
  for (int n = 0; n < 100000; ++n) {
    const double e = -1.0 / (2.0 * (n + 0.5) * (n + 0.5)) + mu;
    if (e < 0.0) s += (2.0 * n + 1.0) * e;
  }
  return s;
}

double mu_ladder(int m) { return 1.0 / (2.0 * (m + 0.5) * (m + 0.5)); }

}  // namespace

TEST_CASE("constant c_H") {
  CHECK(c_hydrogen() == doctest::Approx(-2.2338729).epsilon(1e-7));
  CHECK(std::round(c_hydrogen() * 1e4) / 1e4 == -2.2339);
}

TEST_CASE("levels") {
  CHECK(hydrogen_level(0).energy == -2.0);
  CHECK(hydrogen_level(0).multiplicity == 1);
  CHECK(hydrogen_level(1).energy == doctest::Approx(-2.0 / 9.0));
  CHECK(hydrogen_level(1).multiplicity == 3);
  CHECK(hydrogen_level(2).energy == doctest::Approx(-0.08));
  CHECK(hydrogen_level(2).multiplicity == 5);
  CHECK_THROWS_AS(hydrogen_level(-1), ParameterError);
}

TEST_CASE("exact trace") {
  CHECK(exact_trace(2.0) == 0.0);
  CHECK(exact_trace(3.0) == 0.0);
  CHECK(exact_trace(2.0 / 9.0) == doctest::Approx(-16.0 / 9.0));
  CHECK(exact_trace(0.08) == doctest::Approx(-(2.0 + 2.0 / 3.0 + 0.4) + 9.0 / 12.5));
  for (int m : {0, 1, 5, 40}) {
    const double closed = -half_odd_harmonic(m) +
                          (m + 1.0) * (m + 1.0) / (2.0 * (m + 0.5) * (m + 0.5));
    CHECK(exact_trace(mu_ladder(m)) == doctest::Approx(closed).epsilon(1e-12));
  }
  for (double mu : {1e-3, 0.01, 0.3, 1.7})
    CHECK(exact_trace(mu) == doctest::Approx(level_sum_oracle(mu)).epsilon(1e-12));
  CHECK_THROWS_AS(exact_trace(0.0), ParameterError);
}

TEST_CASE("exact trace is continuous and nondecreasing") {
  double previous = exact_trace(1e-4);
  for (double mu = 1e-4; mu < 2.5; mu *= 1.01) {
    const double cur = exact_trace(mu);
    CHECK(cur >= previous - 1e-13);
    previous = cur;
  }
  // Continuity across a level threshold.
  const double t = mu_ladder(3);
  CHECK(std::abs(exact_trace(t * (1 + 1e-9)) - exact_trace(t * (1 - 1e-9))) < 1e-7);
}

TEST_CASE("asymptotic forms") {
  CHECK(asymptotic_trace_mu(1.0) == doctest::Approx(0.5 * c_hydrogen()));
  CHECK(asymptotic_trace_mu(std::exp(1.0)) == doctest::Approx(0.5 * (1.0 + c_hydrogen())));
  CHECK(asymptotic_trace_h(std::sqrt(0.5), 1.0) == doctest::Approx(0.5 * c_hydrogen()));
  const double h = 0.05;
  CHECK(std::abs(scaled_exact_trace(h, 1.0) - asymptotic_trace_h(h, 1.0)) * h * h < 0.05);
  CHECK_THROWS_AS(asymptotic_trace_h(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(asymptotic_trace_mu(-1.0), ParameterError);
}

TEST_CASE("small-mu semiclassics along the level ladder") {
  double previous = 1e300;
  for (int m : {10, 100, 1000}) {
    const double mu = mu_ladder(m);
    const double gap = std::abs(exact_trace(mu) - asymptotic_trace_mu(mu));
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(std::abs(exact_trace(mu_ladder(10)) - asymptotic_trace_mu(mu_ladder(10))) <= 0.1);
  CHECK(std::abs(exact_trace(mu_ladder(1000)) - asymptotic_trace_mu(mu_ladder(1000))) <= 0.002);
}

TEST_CASE("Euler sum") {
  const double m = 1e5;
  CHECK(std::abs(half_odd_harmonic(100000) - std::log(m) -
                 (2.0 * std::log(2.0) + kEulerGamma)) < 1e-3);
}
