#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace afc::analysis {

/// p(x) = mean + amp_c cos 2x + amp_s sin 2x
struct VisibilityFit {
  double visibility = 0.0;      // clipped to [0, 1]
  double visibility_raw = 0.0;  // sqrt(amp_c^2 + amp_s^2) / mean, unclipped
  double phase = 0.0;           // atan2(amp_s, amp_c)
  double mean = 0.0;
  double amp_c = 0.0;
  double amp_s = 0.0;
  double se_visibility = 0.0;
  double se_phase = 0.0;
  double se_mean = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;
  std::vector<double> residuals;

  double predict(double x) const;
};

/// Weighted least squares with weights 1/errors^2. Errors: invalid-argument
/// (size mismatch, non-positive errors), degenerate-design (fewer than four
/// distinct settings modulo pi, or a singular normal matrix).
VisibilityFit fit_visibility(std::span<const double> settings, std::span<const double> probabilities,
                             std::span<const double> errors);

/// Poisson error of k / total, with k floored at one count.
double poisson_probability_error(std::uint64_t k, std::uint64_t total);

/// (2 + v_h + v_v) / 4. Errors: invalid-argument outside [0, 1].
double fidelity_from_visibilities(double v_h, double v_v);
double fidelity_error_from_visibilities(double se_h, double se_v);

}  // namespace afc::analysis
