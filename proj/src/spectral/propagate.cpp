#include "afc/spectral/propagate.hpp"

#include <cmath>
#include <numbers>

#include "afc/error.hpp"
#include "afc/simd/kernels.hpp"
#include "afc/spectral/fft.hpp"

namespace afc::spectral {

double TemporalTrace::energy() const {
  return simd::active_kernels().sum_norm(amplitude.data(), amplitude.size()) * time_step;
}

double TemporalTrace::window_energy(double t_lo, double t_hi) const {
  if (t_samples.empty() || t_lo < t_samples.front() || t_hi > t_samples.back() || t_hi < t_lo) {
    throw Error(Errc::window_outside_trace, "requested window is not covered by the trace");
  }
  double acc = 0.0;
  for (std::size_t n = 0; n < t_samples.size(); ++n) {
    if (t_samples[n] >= t_lo && t_samples[n] <= t_hi) acc += intensity[n];
  }
  return acc * time_step;
}

std::vector<std::complex<double>> gaussian_pulse_spectrum(const FrequencyGrid& grid,
                                                          double intensity_fwhm, double t_peak) {
  if (!(intensity_fwhm > 0.0)) throw Error(Errc::invalid_argument, "pulse bandwidth must be positive");
  std::vector<std::complex<double>> spec(grid.n_points);
  const double a = 2.0 * std::numbers::ln2 / (intensity_fwhm * intensity_fwhm);
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double f = grid.frequency(k) - grid.center_frequency;
    spec[k] = std::polar(std::exp(-a * f * f), -2.0 * std::numbers::pi * f * t_peak);
  }
  return spec;
}

namespace {

// Inverse transform of a grid spectrum into a time-ordered trace. Sample k is
// at detuning -span/2 + k df, which contributes (-1)^n to the n-th time sample.
TemporalTrace to_time_domain(std::vector<std::complex<double>> spectrum, const FrequencyGrid& grid,
                             double input_energy) {
  const std::size_t n = grid.n_points;
  fft_inplace(spectrum, FftDirection::backward);
  TemporalTrace trace;
  trace.time_step = grid.time_step();
  trace.input_energy = input_energy;
  trace.t_samples.resize(n);
  trace.intensity.resize(n);
  trace.amplitude.resize(n);
  const double scale = 1.0 / static_cast<double>(n);
  const std::size_t half = n / 2;
  for (std::size_t j = 0; j < n; ++j) {
    // time-ordered index j maps to DFT index (j + half) mod n
    const std::size_t idx = (j + half) % n;
    const double sign = (idx % 2 == 0) ? 1.0 : -1.0;
    const std::complex<double> a = spectrum[idx] * (sign * scale);
    trace.t_samples[j] = (static_cast<double>(j) - static_cast<double>(half)) * trace.time_step;
    trace.amplitude[j] = a;
  }
  return trace;
}

double spectral_energy(std::span<const std::complex<double>> spec, const FrequencyGrid& grid) {
  // Parseval: sum_n |a_n|^2 dt = dt / N * sum_k |X_k|^2
  return simd::active_kernels().sum_norm(spec.data(), spec.size()) * grid.time_step() /
         static_cast<double>(grid.n_points);
}

void finish_intensity(TemporalTrace& trace) {
  for (std::size_t j = 0; j < trace.size(); ++j) trace.intensity[j] = std::norm(trace.amplitude[j]);
}

}  // namespace

TemporalTrace propagate_wavepacket(std::span<const std::complex<double>> input_spectrum,
                                   const SpectralTransfer& transfer,
                                   const PropagationOptions& options) {
  if (input_spectrum.size() != transfer.grid.n_points ||
      transfer.amplitude_response.size() != transfer.grid.n_points) {
    throw Error(Errc::grid_mismatch, "input spectrum and transfer function are on different grids");
  }
  std::vector<std::complex<double>> product(input_spectrum.size());
  simd::active_kernels().complex_multiply(input_spectrum.data(), transfer.amplitude_response.data(),
                                          product.data(), product.size());
  TemporalTrace trace =
      to_time_domain(std::move(product), transfer.grid, spectral_energy(input_spectrum, transfer.grid));
  if (std::isfinite(options.coherence_time)) {
    if (!(options.coherence_time > 0.0)) {
      throw Error(Errc::invalid_argument, "coherence time must be positive");
    }
    for (std::size_t j = 0; j < trace.size(); ++j) {
      if (trace.t_samples[j] > 0.0) trace.amplitude[j] *= std::exp(-trace.t_samples[j] / options.coherence_time);
    }
  }
  finish_intensity(trace);
  return trace;
}

TemporalTrace input_trace(std::span<const std::complex<double>> input_spectrum,
                          const FrequencyGrid& grid) {
  if (input_spectrum.size() != grid.n_points) {
    throw Error(Errc::grid_mismatch, "input spectrum does not match grid");
  }
  TemporalTrace trace = to_time_domain(
      std::vector<std::complex<double>>(input_spectrum.begin(), input_spectrum.end()), grid,
      spectral_energy(input_spectrum, grid));
  finish_intensity(trace);
  return trace;
}

EchoMetrics echo_metrics(const TemporalTrace& trace, double delta, double window) {
  if (!(delta > 0.0)) throw Error(Errc::nonpositive_delta, "tooth spacing must be positive");
  const double t_echo = 1.0 / delta;
  const double w = window > 0.0 ? window : t_echo;
  const double lo = t_echo - 0.5 * w, hi = t_echo + 0.5 * w;
  if (trace.t_samples.empty() || -0.5 * w < trace.t_samples.front() || hi > trace.t_samples.back()) {
    throw Error(Errc::window_outside_trace, "echo window is not covered by the trace");
  }
  double e_echo = 0.0, moment = 0.0, e_prompt = 0.0, prompt_moment = 0.0;
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const double t = trace.t_samples[j];
    if (t >= lo && t <= hi) {
      e_echo += trace.intensity[j];
      moment += trace.intensity[j] * t;
    }
    if (t >= -0.5 * w && t <= 0.5 * w) {
      e_prompt += trace.intensity[j];
      prompt_moment += trace.intensity[j] * t;
    }
  }
  EchoMetrics m;
  const double norm = trace.input_energy > 0.0 ? trace.time_step / trace.input_energy : 0.0;
  m.efficiency = e_echo * norm;
  m.transmitted_fraction = e_prompt * norm;
  m.echo_time = e_echo > 0.0 ? moment / e_echo : t_echo;
  m.prompt_time = e_prompt > 0.0 ? prompt_moment / e_prompt : 0.0;
  return m;
}

double analytic_echo_efficiency(double d_peak, double finesse, double d0, ToothShape shape) {
  if (!(finesse >= 1.0)) throw Error(Errc::invalid_argument, "finesse must be >= 1");
  if (!(d_peak >= 0.0) || !(d0 >= 0.0)) throw Error(Errc::invalid_argument, "depths must be >= 0");
  const double d_eff = d_peak / finesse;
  double dephasing = 0.0;
  if (shape == ToothShape::square) {
    const double x = std::numbers::pi / finesse;
    const double sinc = std::sin(x) / x;
    dephasing = sinc * sinc;
  } else {
    dephasing = std::exp(-7.0 / (finesse * finesse));
  }
  return d_eff * d_eff * std::exp(-d_eff) * std::exp(-d0) * dephasing;
}

}  // namespace afc::spectral
