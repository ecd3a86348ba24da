#include "tf2d/hydrogen.hpp"

#include <cmath>

#include "tf2d/errors.hpp"

namespace tf2d {

double c_hydrogen() { return 1.0 - 3.0 * std::log(2.0) - 2.0 * kEulerGamma; }

HydrogenLevel hydrogen_level(std::int64_t n) {
  if (n < 0) throw ParameterError("hydrogen_level: n must be >= 0");
  const double k = static_cast<double>(n) + 0.5;
  return {-0.5 / (k * k), 2 * n + 1};
}

double exact_trace(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw ParameterError("exact_trace: mu must be positive");
  double sum = 0.0;
  for (std::int64_t n = 0;; ++n) {
    const auto level = hydrogen_level(n);
    const double shifted = level.energy + mu;
    if (shifted >= 0.0) break;
    sum += static_cast<double>(level.multiplicity) * shifted;
  }
  return sum;
}

double asymptotic_trace_mu(double mu) {
  if (!(mu > 0.0)) throw ParameterError("asymptotic_trace_mu: mu must be positive");
  return 0.5 * (std::log(mu) + c_hydrogen());
}

double asymptotic_trace_h(double h, double mu) {
  if (!(h > 0.0) || !(mu > 0.0))
    throw ParameterError("asymptotic_trace_h: h and mu must be positive");
  const double h2 = h * h;
  return (std::log(2.0 * h2) + std::log(mu) + c_hydrogen()) / (4.0 * h2);
}

double scaled_exact_trace(double h, double mu) {
  if (!(h > 0.0)) throw ParameterError("scaled_exact_trace: h must be positive");
  const double h2 = h * h;
  return exact_trace(2.0 * h2 * mu) / (2.0 * h2);
}

double half_odd_harmonic(std::int64_t m) {
  if (m < 0) throw ParameterError("half_odd_harmonic: m must be >= 0");
  double sum = 0.0;
  // Smallest terms first.
  for (std::int64_t n = m; n >= 0; --n) sum += 1.0 / (static_cast<double>(n) + 0.5);
  return sum;
}

}  // namespace tf2d
