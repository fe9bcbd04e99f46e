#pragma once

#include <cstddef>
#include <cstdint>

#include "afc/spectral/comb.hpp"

namespace afc::dicke {

/// Cross-check of the atom-sum oracle against the transfer-function engine on
/// the same comb.
///
/// Timing: the oracle echo time is the centroid of I(t) within +-4/bandwidth
/// of 1/delta; the transfer engine contributes the echo-to-prompt delay of a
/// probe pulse whose spectral FWHM is probe_fraction * bandwidth.
///
/// Rephasing ratio: the oracle gives I(1/delta)/I(0). The transfer engine
/// gives (eta / T) / ln(T)^2 with eta the echo efficiency and T the prompt
/// transmission, i.e. |first Fourier coefficient / mean| of the optical depth
/// squared. Both reduce to sinc^2(pi/F) for square teeth without background.
struct EngineComparison {
  double echo_time_oracle = 0.0;
  double echo_time_fft = 0.0;
  double time_agreement = 0.0;  // |difference|, s
  double ratio_oracle = 0.0;
  double ratio_fft = 0.0;
  double ratio_agreement = 0.0;  // relative to ratio_fft
  double grid_bin = 0.0;         // time step of the transfer engine
  bool no_echo = false;
};

struct CompareOptions {
  double probe_fraction = 0.25;
};

EngineComparison compare_engines(const spectral::CombProfile& comb, std::size_t n_atoms,
                                 std::uint64_t seed, const CompareOptions& options = {});

}  // namespace afc::dicke
