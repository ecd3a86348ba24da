#include <doctest.h>

#include <cmath>
#include <numbers>

#include "tf2d/energy.hpp"
#include "tf2d/errors.hpp"
#include "tf2d/hydrogen.hpp"

using namespace tf2d;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr solver_grid() {
  static const GridPtr g = make_tf_grid(1000, 1e-6, 1e7);
  return g;
}

const TFSolution& neutral() {
  static const TFSolution s = tf_solve(1.0, solver_grid());
  return s;
}

}  // namespace

TEST_CASE("energy prediction") {
  const double e = -0.1148;
  for (double lambda : {0.5, 1.0}) {
    const auto p = predict_energy({1.0, lambda}, e);
    CHECK(p.total == doctest::Approx(e + 0.5 * c_hydrogen()));
    CHECK(p.leading == 0.0);
    CHECK(p.lambda == lambda);
  }
  const double tf1 = neutral().energy;
  const auto p = predict_energy({100.0, 100.0}, tf1);
  CHECK(p.leading == doctest::Approx(-0.5 * 1e4 * std::log(100.0)));
  CHECK(p.second == doctest::Approx((tf1 + 0.5 * c_hydrogen()) * 1e4));
  CHECK(p.total == doctest::Approx(p.leading + p.second));

  // dE/dZ at fixed lambda: -Z ln Z - Z/2 + 2 (E + c_H/2) Z.
  const double Z = 37.0, dz = 1e-4;
  const double slope = (predict_energy({Z + dz, Z + dz}, tf1).total -
                        predict_energy({Z - dz, Z - dz}, tf1).total) / (2 * dz);
  const double exact = -Z * std::log(Z) - 0.5 * Z + 2.0 * (tf1 + 0.5 * c_hydrogen()) * Z;
  CHECK(slope == doctest::Approx(exact).epsilon(1e-8));

  CHECK_THROWS_AS(predict_energy({0.0, 1.0}, e), ParameterError);
  CHECK_THROWS_AS(predict_energy({1.0, -1.0}, e), ParameterError);
}

TEST_CASE("extensivity constant: oracle density") {
  // rho = e^-r: pi R 2 pi int_{2R} s e^{-2s} ds = 2 pi^2 R e^{-4R} (R + 1/4).
  const auto g = std::make_shared<const RadialGrid>(make_log_grid(1200, 1e-6, 200.0));
  std::vector<double> v(g->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-g->node(i));
  const RadialDensity rho(g, v);
  for (double R : {0.5, 1.0, 2.0, 4.0})
    CHECK(extensivity_constant(rho, R) ==
          doctest::Approx(2 * kPi * kPi * R * std::exp(-4 * R) * (R + 0.25)).epsilon(1e-5));
  CHECK_THROWS_AS(extensivity_constant(rho, 60.0), DomainError);
  CHECK_THROWS_AS(extensivity_constant(rho, 0.0), DomainError);
}

TEST_CASE("extensivity constant: neutral TF atom") {
  const auto rows = predict_radius_growth(neutral(), {0.5, 1.0, 2.0, 4.0});
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.C_R > 0.0);
    CHECK(r.C_R == doctest::Approx(kPi * r.R * r.tail_integral));
  }
  for (std::size_t k = 1; k < rows.size(); ++k)
    CHECK(rows[k].tail_integral < rows[k - 1].tail_integral);
  // int_{>=2R} rho^2 >= (sup_{>=2R} rho) ... lower bound from a single shell:
  // rho is decreasing, so int_{2R}^{4R} rho^2 >= rho(4R)^2 pi (16 - 4) R^2.
  for (const auto& r : rows) {
    const double rho4 = neutral().density.grid().interpolate(neutral().density.values(), 4 * r.R);
    CHECK(r.tail_integral >= rho4 * rho4 * kPi * 12.0 * r.R * r.R);
  }
  CHECK_THROWS_AS(predict_radius_growth(neutral(), {2.0, 1.0}), ParameterError);
  const auto ion = tf_solve(0.5, solver_grid());
  CHECK_THROWS_AS(extensivity_constant(ion, 1.0), PreconditionError);
  CHECK(extensivity_constant(ion.density, 2.0 * *ion.support_radius) == 0.0);
}

TEST_CASE("energy JSON") {
  nlohmann::json j = predict_energy({100.0, 100.0}, -0.1);
  CHECK(j.at("Z").get<double>() == 100.0);
  CHECK(j.at("lambda").get<double>() == 1.0);
  CHECK(j.at("terms").contains("leading"));
  CHECK(j.at("terms").contains("second"));
  CHECK(j.at("E_predicted").get<double>() ==
        j.at("terms").at("leading").get<double>() + j.at("terms").at("second").get<double>());
}
