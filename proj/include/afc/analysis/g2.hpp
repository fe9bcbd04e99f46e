#pragma once

#include <cstdint>
#include <span>

#include "afc/source/coincidence.hpp"

namespace afc::analysis {

struct G2Estimate {
  double g2 = 0.0;
  double std_error = 0.0;
};

/// g2 = N_si N_pulses / (N_s N_i), first-order Poisson error. Errors:
/// zero-singles, invalid-argument (no pulses).
G2Estimate estimate_g2(const source::CoincidenceSet& counts);

/// Ratio of the true-coincidence peak to the mean of the accidental side
/// peaks (herald paired with neighbouring pulse slots).
G2Estimate estimate_g2_side_peaks(std::uint64_t n_central, std::span<const std::uint64_t> side_peaks);

/// Expected click-detector g2 for an M-mode thermal pair source with
/// per-pulse dark-click probabilities. Exact for threshold detectors.
struct ClickModel {
  double p_s = 0.0;
  double p_i = 0.0;
  double p_si = 0.0;
  double g2() const { return p_si / (p_s * p_i); }
};
ClickModel click_model(double mu, double eta_s, double eta_i, unsigned modes = 1, double dark_s = 0.0,
                       double dark_i = 0.0);

}  // namespace afc::analysis
