#pragma once

#include <cstdint>

namespace tf2d {

inline constexpr double kEulerGamma = 0.57721566490153286061;

/// 1 - 3 ln 2 - 2 gamma_E.
double c_hydrogen();

struct HydrogenLevel {
  double energy = 0.0;
  std::int64_t multiplicity = 0;
};

/// Level n of -Delta/2 - 1/|x| on R^2: -1/(2 (n + 1/2)^2), multiplicity 2n + 1.
HydrogenLevel hydrogen_level(std::int64_t n);

/// Tr[-Delta/2 - 1/|x| + mu]_-, summed over the levels below -mu.
double exact_trace(double mu);

/// (1/2)(ln mu + c_H).
double asymptotic_trace_mu(double mu);

/// (4 h^2)^-1 (ln(2 h^2) + ln mu + c_H).
double asymptotic_trace_h(double h, double mu);

/// Tr[-h^2 Delta - 1/|x| + mu]_- = (2 h^2)^-1 exact_trace(2 h^2 mu).
double scaled_exact_trace(double h, double mu);

/// sum_{n=0}^m 1/(n + 1/2).
double half_odd_harmonic(std::int64_t m);

}  // namespace tf2d
