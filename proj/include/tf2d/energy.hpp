#pragma once

#include <vector>

#include <json.hpp>

#include "tf2d/tf.hpp"

namespace tf2d {

struct AtomSpec {
  double Z = 1.0;  ///< nuclear charge
  double N = 1.0;  ///< electron number (continuous)
  double lambda() const { return N / Z; }
};

/// -Z^2 ln(Z)/2 + (E^TF + c_H/2) Z^2, without the o(Z^2) remainder.
struct EnergyPrediction {
  double Z = 0.0;
  double N = 0.0;
  double lambda = 0.0;
  double leading = 0.0;  ///< -Z^2 ln(Z)/2
  double second = 0.0;   ///< (E^TF(min{lambda,1}) + c_H/2) Z^2
  double total = 0.0;
};

/// ParameterError unless Z > 0 and N > 0. `tf_energy` is E^TF(min{lambda,1}).
EnergyPrediction predict_energy(const AtomSpec& spec, double tf_energy);

/// pi R int_{|x| >= 2R} rho^2.
double extensivity_constant(const RadialDensity& rho, double R);
/// Neutral solutions only (PreconditionError if lambda < 1); DomainError
/// unless 0 < 2R < r_max/2.
double extensivity_constant(const TFSolution& sol, double R);

struct RadiusGrowthRow {
  double R = 0.0;
  double tail_integral = 0.0;  ///< int_{|x| >= 2R} rho^2
  double C_R = 0.0;            ///< pi R tail_integral
};

/// C_R for ascending R values.
std::vector<RadiusGrowthRow> predict_radius_growth(
    const TFSolution& sol, const std::vector<double>& R_values);

/// {"Z", "N", "lambda", "E_predicted", "terms": {"leading", "second"}}.
void to_json(nlohmann::json& j, const EnergyPrediction& p);

}  // namespace tf2d
