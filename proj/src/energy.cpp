#include "tf2d/energy.hpp"

#include <cmath>
#include <numbers>

#include "tf2d/errors.hpp"
#include "tf2d/hydrogen.hpp"

namespace tf2d {

EnergyPrediction predict_energy(const AtomSpec& spec, double tf_energy) {
  if (!(spec.Z > 0.0) || !(spec.N > 0.0) || !std::isfinite(spec.Z) ||
      !std::isfinite(spec.N))
    throw ParameterError("predict_energy: need Z > 0 and N > 0");
  if (!std::isfinite(tf_energy))
    throw ParameterError("predict_energy: TF energy not finite");
  EnergyPrediction p;
  p.Z = spec.Z;
  p.N = spec.N;
  p.lambda = spec.lambda();
  const double z2 = spec.Z * spec.Z;
  p.leading = -0.5 * z2 * std::log(spec.Z);
  p.second = (tf_energy + 0.5 * c_hydrogen()) * z2;
  p.total = p.leading + p.second;
  return p;
}

double extensivity_constant(const RadialDensity& rho, double R) {
  const auto& g = rho.grid();
  if (!(R > 0.0) || !(2.0 * R < 0.5 * g.r_max()))
    throw DomainError("extensivity_constant: need 0 < 2R < r_max/2");
  std::vector<double> sq(rho.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = rho.value(i) * rho.value(i);
  return std::numbers::pi * R * g.integrate_from(sq, 2.0 * R);
}

double extensivity_constant(const TFSolution& sol, double R) {
  if (sol.lambda < 1.0)
    throw PreconditionError(
        "extensivity_constant: defined for neutral solutions (lambda >= 1)");
  return extensivity_constant(sol.density, R);
}

std::vector<RadiusGrowthRow> predict_radius_growth(
    const TFSolution& sol, const std::vector<double>& R_values) {
  std::vector<RadiusGrowthRow> rows;
  for (std::size_t k = 0; k < R_values.size(); ++k) {
    if (k > 0 && !(R_values[k] > R_values[k - 1]))
      throw ParameterError("predict_radius_growth: R values must ascend");
    const double c = extensivity_constant(sol, R_values[k]);
    rows.push_back({R_values[k], c / (std::numbers::pi * R_values[k]), c});
  }
  return rows;
}

void to_json(nlohmann::json& j, const EnergyPrediction& p) {
  j = nlohmann::json{{"Z", p.Z},
                     {"N", p.N},
                     {"lambda", p.lambda},
                     {"E_predicted", p.total},
                     {"terms", {{"leading", p.leading}, {"second", p.second}}}};
}

}  // namespace tf2d
