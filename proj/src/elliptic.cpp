#include "tf2d/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tf2d/errors.hpp"

namespace tf2d {

namespace {

double agm(double a, double b) {
  for (int it = 0; it < 64 && std::abs(a - b) >= 1e-15 * a; ++it) {
    const double m = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

double ellint_K(double k) {
  if (!(k >= 0.0 && k < 1.0)) throw DomainError("ellint_K: need 0 <= k < 1");
  // 1 - k^2 = (1 - k)(1 + k) keeps precision near k = 1.
  return std::numbers::pi / (2.0 * agm(1.0, std::sqrt((1.0 - k) * (1.0 + k))));
}

double half_integral_closed_form(double k) {
  if (!(k > 0.0 && k < 1.0))
    throw DomainError("half_integral_closed_form: need 0 < k < 1");
  const double q = std::sqrt(k);
  return 2.0 * std::atanh(q) / q;
}

double angular_kernel(double r, double s) {
  if (!(r > 0.0) || !(s > 0.0) || !std::isfinite(r) || !std::isfinite(s))
    throw DomainError("angular_kernel: radii must be positive and finite");
  const double hi = std::max(r, s);
  if (std::abs(r - s) < 1e-12 * hi)
    throw SingularityError("angular_kernel: r == s");
  // Landen form: 4/(r+s) K(2 sqrt(rs)/(r+s)) = 2 pi / AGM(r + s, |r - s|).
  return 2.0 * std::numbers::pi / agm(r + s, std::abs(r - s));
}

double kernel_log_argument(double r, double s) {
  return 1.0 - std::min(r, s) / std::max(r, s);
}

}  // namespace tf2d
