#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

namespace tf2d {

using RadialPotential = std::function<double(double)>;

/// One angular-momentum channel of -h^2 Delta - V on the disk |x| < R.
///
/// Cell-centred mesh r_i = (i - 1/2) delta, i = 1..N, delta = R/(N + 1/2),
/// Dirichlet at r_{N+1} = R. `potential` holds V(r_i).
struct ChannelProblem {
  int m = 0;
  double h = 1.0;
  double radius = 1.0;
  std::vector<double> potential;
};

/// Mesh node r_i (1-based) for N cells on [0, R].
double channel_node(double radius, std::size_t mesh_size, std::size_t i);
/// Samples V at the mesh nodes; NumericError if a value is not finite.
std::vector<double> sample_potential(const RadialPotential& V, double radius,
                                     std::size_t mesh_size);

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  ///< size diag.size() - 1
};

/// Conservative discretization of the radial operator in u = r^{1/2} psi:
/// diag 2h^2/delta^2 + h^2 m^2/r_i^2 - V(r_i),
/// off -h^2 i delta / (delta^2 sqrt(r_i r_{i+1})). Second order for every m.
/// ParameterError if N < 200.
Tridiagonal channel_matrix(const ChannelProblem& prob);

/// Number of eigenvalues strictly below x.
std::size_t sturm_count(const Tridiagonal& t, double x);

/// Ascending eigenvalues below `bound`, each to absolute accuracy `tol`,
/// by Sturm-sequence bisection.
std::vector<double> tridiag_eigen_below(const Tridiagonal& t, double bound,
                                        double tol = 1e-10);

struct ChannelSpectrum {
  int m = 0;
  std::vector<double> eigenvalues;  ///< ascending, negative
  int multiplicity = 1;             ///< 1 for m = 0, else 2
};

/// Negative eigenvalues of channels 0..m_max on one mesh.
std::vector<ChannelSpectrum> channel_spectra(const RadialPotential& V, double h,
                                             double radius, std::size_t mesh_size,
                                             int m_max);

struct SpectralOptions {
  std::optional<double> radius;          ///< default: from the support of V
  std::optional<std::size_t> mesh_size;  ///< coarse mesh; default R/delta
  double resolution = 20.0;  ///< delta <= h^2 / resolution
  int m_max = 5000;          ///< channel cap
  /// Auto radius: 1.5 R_pos + 30 h with R_pos the last scanned radius where
  /// V > threshold.
  double threshold = 1e-5;
  double scan_limit = 1e4;
};

struct ChannelSum {
  int m = 0;
  std::size_t count = 0;  ///< negative eigenvalues on the fine mesh
  double sum = 0.0;       ///< extrapolated eigenvalue sum (one sign of m)
};

struct TraceResult {
  double h = 0.0;
  double sum = 0.0;             ///< Tr[-h^2 Delta - V]_-
  double error_estimate = 0.0;  ///< size of the Richardson correction
  double radius = 0.0;
  std::size_t mesh_size = 0;    ///< coarse mesh
  std::vector<ChannelSum> channels;
};

/// Auto truncation radius used when opts.radius is unset.
double spectral_radius(const RadialPotential& V, double h,
                       const SpectralOptions& opts = {});

/// Sum of the negative eigenvalues of -h^2 Delta - V on R^2 for radial V,
/// over channels m until the first empty one (the next must be empty too,
/// else TruncationError), on meshes N and 2N with Richardson extrapolation.
TraceResult neg_eigenvalue_sum(const RadialPotential& V, double h,
                               const SpectralOptions& opts = {});

/// {"h", "sum", "channels": [{"m", "count", "sum"}], "error_estimate"}.
void to_json(nlohmann::json& j, const TraceResult& r);

}  // namespace tf2d
