#pragma once

#include <complex>
#include <span>
#include <vector>

#include "afc/spectral/comb.hpp"
#include "afc/spectral/grid.hpp"

namespace afc::spectral {

/// Zero-padding factor applied before the FFT Hilbert transform.
inline constexpr std::size_t kHilbertPadFactor = 4;

/// Causal (minimum-phase) partner of -d/2 on the grid: returns phi such that
/// exp(-d/2 + i phi) is the transfer function of a causal medium. Computed
/// by FFT with kHilbertPadFactor zero padding after removing the mean of the
/// two edge samples (the transform of a constant vanishes).
/// Errors: non-finite.
std::vector<double> kramers_kronig_phase(std::span<const double> optical_depth);
std::vector<double> kramers_kronig_phase(const CombProfile& comb);

struct SpectralTransfer {
  FrequencyGrid grid;
  std::vector<std::complex<double>> amplitude_response;  // H(f) = exp(-d/2 + i phi)
};

struct TransferOptions {
  bool dispersion = true;  // false: H = exp(-d/2), purely real
};

SpectralTransfer transfer_function(const CombProfile& comb, const TransferOptions& options = {});

}  // namespace afc::spectral
