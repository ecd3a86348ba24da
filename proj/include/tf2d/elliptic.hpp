#pragma once

namespace tf2d {

/// Complete elliptic integral of the first kind,
/// K(k) = int_0^{pi/2} dtheta / sqrt(1 - k^2 sin^2 theta), via the AGM.
/// Throws DomainError unless 0 <= k < 1.
double ellint_K(double k);

/// int_0^1 dt / sqrt((1 - t)(1 - k t)) = ln((1 + sqrt k)/(1 - sqrt k)) / sqrt k
/// for 0 < k < 1.
double half_integral_closed_form(double k);

/// int_0^{2 pi} dtheta / sqrt(r^2 + s^2 - 2 r s cos theta)
///   = 4/(r + s) K(2 sqrt(rs)/(r + s)).
/// Throws SingularityError for |r - s| < 1e-12 max(r, s).
double angular_kernel(double r, double s);

/// 1 - min/max, the argument of the log bound for angular_kernel.
double kernel_log_argument(double r, double s);

}  // namespace tf2d
