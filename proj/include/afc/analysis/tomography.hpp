#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "afc/polarization/jones.hpp"

namespace afc::analysis {

using DensityMatrix = Eigen::Matrix2cd;

/// Counts at the two outputs of one analyzer setting.
struct BasisCounts {
  double plus = 0.0;
  double minus = 0.0;
  double total() const { return plus + minus; }
};

/// H/V, D/A = (H +- V)/sqrt2, R/L = (H +- iV)/sqrt2.
struct TomographyCounts {
  BasisCounts hv;
  BasisCounts da;
  BasisCounts rl;
};

struct StokesEstimate {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  DensityMatrix rho = DensityMatrix::Identity() / 2.0;

  double length() const { return std::sqrt(s1 * s1 + s2 * s2 + s3 * s3); }
  bool physical() const { return length() <= 1.0; }
};

/// rho = (I + s1 Z + s2 X + s3 Y) / 2
DensityMatrix density_from_stokes(double s1, double s2, double s3);
DensityMatrix pure_density(const pol::JonesVector& psi);

/// Linear inversion. Errors: zero-basis-total.
StokesEstimate stokes_reconstruct(const TomographyCounts& counts);

/// Frobenius-nearest unit-trace PSD matrix (eigenvalue water-filling).
DensityMatrix mle_project(const DensityMatrix& rho_lin);

/// Comparison baseline: each Stokes component clipped to [-1, 1], then the
/// vector rescaled onto the unit ball if still outside.
DensityMatrix clamp_baseline(const StokesEstimate& s);

/// <psi|rho|psi> for normalized psi.
double state_fidelity(const DensityMatrix& rho, const pol::JonesVector& target);

bool is_density_matrix(const DensityMatrix& rho, double tol = 1e-10);

/// Expected counts for state rho with n_per_basis detections per setting.
TomographyCounts expected_counts(const DensityMatrix& rho, double n_per_basis);

struct BootstrapResult {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Parametric bootstrap over binomial recounts of every basis.
BootstrapResult bootstrap_fidelity(const TomographyCounts& counts, const pol::JonesVector& target,
                                   std::size_t n_resamples, std::uint64_t seed);

}  // namespace afc::analysis
