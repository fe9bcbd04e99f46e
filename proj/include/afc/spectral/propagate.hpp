#pragma once

#include <complex>
#include <limits>
#include <span>
#include <vector>

#include "afc/spectral/comb.hpp"
#include "afc/spectral/grid.hpp"
#include "afc/spectral/transfer.hpp"

namespace afc::spectral {

/// Time-ordered field on t_n = (n - N/2) dt. Energies are sum |a|^2 dt.
struct TemporalTrace {
  std::vector<double> t_samples;
  std::vector<double> intensity;
  std::vector<std::complex<double>> amplitude;
  double time_step = 0.0;
  double input_energy = 0.0;

  std::size_t size() const { return t_samples.size(); }
  double energy() const;
  /// Energy in [t_lo, t_hi]. Errors: window-outside-trace.
  double window_energy(double t_lo, double t_hi) const;
};

/// Spectrum of a transform-limited Gaussian pulse whose spectral intensity has
/// the given FWHM and whose envelope peaks at t_peak.
std::vector<std::complex<double>> gaussian_pulse_spectrum(const FrequencyGrid& grid,
                                                          double intensity_fwhm,
                                                          double t_peak = 0.0);

struct PropagationOptions {
  /// Re-emitted light loses coherence as exp(-t/coherence_time) in amplitude.
  double coherence_time = std::numeric_limits<double>::infinity();
};

/// output = IDFT(input * H). Errors: grid-mismatch.
TemporalTrace propagate_wavepacket(std::span<const std::complex<double>> input_spectrum,
                                   const SpectralTransfer& transfer,
                                   const PropagationOptions& options = {});

/// Trace of the input itself (H = 1).
TemporalTrace input_trace(std::span<const std::complex<double>> input_spectrum,
                          const FrequencyGrid& grid);

struct EchoMetrics {
  double efficiency = 0.0;            // echo-window energy / input energy
  double echo_time = 0.0;             // intensity centroid inside the echo window
  double transmitted_fraction = 0.0;  // prompt-window energy / input energy
  double prompt_time = 0.0;           // intensity centroid inside the prompt window
  double echo_delay() const { return echo_time - prompt_time; }
};

/// Echo window: [1/delta - window/2, 1/delta + window/2]; prompt window is the
/// same width centred on t = 0. window <= 0 selects 1/delta.
/// Errors: window-outside-trace, nonpositive-delta.
EchoMetrics echo_metrics(const TemporalTrace& trace, double delta, double window = 0.0);

/// Closed-form forward-recall efficiency
///   (d/F)^2 exp(-d/F) exp(-d0) * dephasing(F),
/// dephasing = sinc^2(pi/F) (square) or exp(-7/F^2) (gaussian).
double analytic_echo_efficiency(double d_peak, double finesse, double d0, ToothShape shape);

}  // namespace afc::spectral
