#include "tf2d/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tf2d/errors.hpp"
#include "tf2d/parallel.hpp"

namespace tf2d {

namespace {

std::size_t count_below(const std::vector<double>& diag,
                        const std::vector<double>& off2, double x) {
  constexpr double pivmin = std::numeric_limits<double>::min() * 1e10;
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    d = diag[i] - x - (i > 0 ? off2[i - 1] / d : 0.0);
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

std::vector<double> squares(const std::vector<double>& v) {
  std::vector<double> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = v[i] * v[i];
  return s;
}

double gershgorin_lower(const Tridiagonal& t) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    double radius = 0.0;
    if (i > 0) radius += std::abs(t.off[i - 1]);
    if (i < t.off.size()) radius += std::abs(t.off[i]);
    lo = std::min(lo, t.diag[i] - radius);
  }
  return lo;
}

void check_tridiagonal(const Tridiagonal& t) {
  if (t.diag.empty() || t.off.size() + 1 != t.diag.size())
    throw ParameterError("tridiagonal: need off.size() == diag.size() - 1");
}

std::size_t default_mesh(double radius, double h, double resolution) {
  const double cells = radius * resolution / (h * h) - 0.5;
  return std::max<std::size_t>(200, static_cast<std::size_t>(std::ceil(cells)));
}

double channel_sum(double h, double radius,
                   const std::vector<double>& samples, int m) {
  const auto t = channel_matrix({m, h, radius, samples});
  const auto ev = tridiag_eigen_below(t, 0.0);
  double s = 0.0;
  for (double e : ev) s += e;
  return s;
}

}  // namespace

double channel_node(double radius, std::size_t mesh_size, std::size_t i) {
  const double delta = radius / (static_cast<double>(mesh_size) + 0.5);
  return (static_cast<double>(i) - 0.5) * delta;
}

std::vector<double> sample_potential(const RadialPotential& V, double radius,
                                     std::size_t mesh_size) {
  std::vector<double> v(mesh_size);
  for (std::size_t i = 0; i < mesh_size; ++i) {
    v[i] = V(channel_node(radius, mesh_size, i + 1));
    if (!std::isfinite(v[i]))
      throw NumericError("sample_potential: V not finite on the mesh");
  }
  return v;
}

Tridiagonal channel_matrix(const ChannelProblem& prob) {
  const std::size_t n = prob.potential.size();
  if (n < 200) throw ParameterError("channel_matrix: mesh_size must be >= 200");
  if (!(prob.h > 0.0) || !(prob.radius > 0.0) || prob.m < 0)
    throw ParameterError("channel_matrix: need h > 0, R > 0, m >= 0");
  const double delta = prob.radius / (static_cast<double>(n) + 0.5);
  const double h2 = prob.h * prob.h;
  const double kinetic = h2 / (delta * delta);
  const double m2 = static_cast<double>(prob.m) * prob.m;
  Tridiagonal t;
  t.diag.resize(n);
  t.off.resize(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double i = static_cast<double>(k + 1);
    const double r = (i - 0.5) * delta;
    if (!std::isfinite(prob.potential[k]))
      throw NumericError("channel_matrix: V not finite on the mesh");
    t.diag[k] = 2.0 * kinetic + h2 * m2 / (r * r) - prob.potential[k];
    if (k + 1 < n) t.off[k] = -kinetic * i / std::sqrt((i - 0.5) * (i + 0.5));
  }
  return t;
}

std::size_t sturm_count(const Tridiagonal& t, double x) {
  check_tridiagonal(t);
  return count_below(t.diag, squares(t.off), x);
}

std::vector<double> tridiag_eigen_below(const Tridiagonal& t, double bound,
                                        double tol) {
  check_tridiagonal(t);
  const auto off2 = squares(t.off);
  const std::size_t k = count_below(t.diag, off2, bound);
  std::vector<double> result(k);
  if (k == 0) return result;
  const double floor = gershgorin_lower(t) - 1.0;
  std::vector<double> lower(k, floor), upper(k, bound);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t j = 0; j < k; ++j) {
    double lo = lower[j], hi = upper[j];
    while (hi - lo > std::max(tol, 4.0 * eps * std::max(std::abs(lo), std::abs(hi)))) {
      const double mid = 0.5 * (lo + hi);
      const std::size_t c = count_below(t.diag, off2, mid);
      if (c > j) {
        hi = mid;
        for (std::size_t i = j + 1; i < std::min(c, k); ++i) upper[i] = std::min(upper[i], mid);
      } else {
        lo = mid;
        for (std::size_t i = c; i < k; ++i) lower[i] = std::max(lower[i], mid);
      }
    }
    result[j] = 0.5 * (lo + hi);
  }
  return result;
}

std::vector<ChannelSpectrum> channel_spectra(const RadialPotential& V, double h,
                                             double radius, std::size_t mesh_size,
                                             int m_max) {
  if (m_max < 0) throw ParameterError("channel_spectra: m_max must be >= 0");
  const auto samples = sample_potential(V, radius, mesh_size);
  std::vector<ChannelSpectrum> out(static_cast<std::size_t>(m_max) + 1);
  parallel_for(out.size(), [&](std::size_t k) {
    const int m = static_cast<int>(k);
    const auto t = channel_matrix({m, h, radius, samples});
    out[k] = {m, tridiag_eigen_below(t, 0.0), m == 0 ? 1 : 2};
  });
  return out;
}

double spectral_radius(const RadialPotential& V, double h,
                       const SpectralOptions& opts) {
  constexpr int samples = 4000;
  const double lo = std::log(1e-3), hi = std::log(opts.scan_limit);
  double last = 0.0;
  for (int k = 0; k <= samples; ++k) {
    const double r = std::exp(lo + (hi - lo) * k / samples);
    if (V(r) > opts.threshold) last = r;
  }
  if (last >= opts.scan_limit)
    throw TruncationError("spectral_radius: V exceeds the threshold at the scan limit");
  return 1.5 * std::max(last, 1.0) + 30.0 * h;
}

TraceResult neg_eigenvalue_sum(const RadialPotential& V, double h,
                               const SpectralOptions& opts) {
  if (!(h > 0.0)) throw ParameterError("neg_eigenvalue_sum: h must be positive");
  TraceResult res;
  res.h = h;
  res.radius = opts.radius ? *opts.radius : spectral_radius(V, h, opts);
  if (!(res.radius > 0.0)) throw ParameterError("neg_eigenvalue_sum: R must be positive");
  res.mesh_size = opts.mesh_size ? *opts.mesh_size
                                 : default_mesh(res.radius, h, opts.resolution);
  const std::size_t n1 = res.mesh_size, n2 = 2 * n1;
  const auto v1 = sample_potential(V, res.radius, n1);
  const auto v2 = sample_potential(V, res.radius, n2);

  auto negatives = [&](int m, const std::vector<double>& v) {
    return sturm_count(channel_matrix({m, h, res.radius, v}), 0.0);
  };
  int stop = 0;
  std::vector<std::size_t> counts;
  for (;; ++stop) {
    if (stop > opts.m_max) {
      std::ostringstream msg;
      msg << "neg_eigenvalue_sum: channel " << opts.m_max
          << " still has negative eigenvalues (h = " << h << ")";
      throw TruncationError(msg.str());
    }
    const std::size_t c2 = negatives(stop, v2);
    if (c2 == 0 && negatives(stop, v1) == 0) break;
    counts.push_back(c2);
  }
  if (negatives(stop + 1, v2) != 0 || negatives(stop + 1, v1) != 0) {
    std::ostringstream msg;
    msg << "neg_eigenvalue_sum: channel " << stop + 1
        << " nonempty after empty channel " << stop;
    throw TruncationError(msg.str());
  }

  const double q = (static_cast<double>(n2) + 0.5) / (static_cast<double>(n1) + 0.5);
  const double factor = 1.0 / (q * q - 1.0);
  std::vector<double> s1(static_cast<std::size_t>(stop)), s2(s1.size());
  parallel_for(2 * s1.size(), [&](std::size_t k) {
    const int m = static_cast<int>(k / 2);
    if (k % 2 == 0) s1[k / 2] = channel_sum(h, res.radius, v1, m);
    else s2[k / 2] = channel_sum(h, res.radius, v2, m);
  });
  double correction = 0.0;
  for (int m = 0; m < stop; ++m) {
    const auto k = static_cast<std::size_t>(m);
    const double mult = m == 0 ? 1.0 : 2.0;
    const double extrapolated = s2[k] + (s2[k] - s1[k]) * factor;
    res.channels.push_back({m, counts[k], extrapolated});
    res.sum += mult * extrapolated;
    correction += mult * (s2[k] - s1[k]) * factor;
  }
  res.error_estimate = std::abs(correction);
  return res;
}

void to_json(nlohmann::json& j, const TraceResult& r) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& c : r.channels)
    channels.push_back({{"m", c.m}, {"count", c.count}, {"sum", c.sum}});
  j = nlohmann::json{{"h", r.h},
                     {"sum", r.sum},
                     {"channels", channels},
                     {"error_estimate", r.error_estimate}};
}

}  // namespace tf2d
