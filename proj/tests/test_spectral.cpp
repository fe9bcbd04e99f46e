#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "afc/error.hpp"
#include "afc/spectral/comb.hpp"
#include "afc/spectral/fft.hpp"
#include "afc/spectral/propagate.hpp"
#include "afc/spectral/transfer.hpp"

using namespace afc::spectral;
using afc::Errc;
using cd = std::complex<double>;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const afc::Error& e) {
    return e.code();
  }
  FAIL("no afc::Error thrown");
  return Errc::io;
}

CombParams comb_params(double d_peak, double finesse, double d0, double delta = 200e6) {
  CombParams p;
  p.delta = delta;
  p.finesse = finesse;
  p.d_peak = d_peak;
  p.d0 = d0;
  return p;
}

double fft_efficiency(const CombParams& p, double probe_fwhm = 2e9) {
  const FrequencyGrid grid;
  const auto comb = build_comb(p, grid);
  const auto trace = propagate_wavepacket(gaussian_pulse_spectrum(grid, probe_fwhm), transfer_function(comb));
  return echo_metrics(trace, p.delta).efficiency;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("fft agrees with a direct DFT and round-trips") {
  const std::size_t n = 64;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<cd> x(n);
  for (auto& z : x) z = {g(rng), g(rng)};
  auto y = x;
  fft_inplace(y, FftDirection::forward);
  for (std::size_t k = 0; k < n; ++k) {
    cd ref = 0.0;
    for (std::size_t j = 0; j < n; ++j) ref += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * j) / n);
    CHECK(std::abs(y[k] - ref) < 1e-11);
  }
  fft_inplace(y, FftDirection::backward);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(y[j] / double(n) - x[j]) < 1e-13);
}

TEST_CASE("paper comb geometry: 40 teeth of 100 MHz across 8 GHz") {
  const FrequencyGrid grid;
  const auto p = comb_params(1.4, 2.0, 0.5);
  const auto comb = build_comb(p, grid);
  CHECK(tooth_count(p) == 40);
  std::vector<std::size_t> run_lengths;
  std::size_t run = 0;
  for (double d : comb.od_samples) {
    if (d > p.d0 + 1e-12) {
      ++run;
    } else if (run > 0) {
      run_lengths.push_back(run);
      run = 0;
    }
  }
  // the window cuts the outermost teeth in half: 39 whole teeth plus two halves
  REQUIRE(run_lengths.size() == 41);
  double covered = 0.0;
  for (std::size_t i = 0; i < run_lengths.size(); ++i) {
    const double w = double(run_lengths[i]) * grid.resolution();
    covered += w;
    CHECK(w == doctest::Approx(i == 0 || i + 1 == run_lengths.size() ? 50e6 : 100e6));
  }
  CHECK(covered == doctest::Approx(40 * 100e6));
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    if (!in_comb_window(p, grid.frequency(k) - grid.center_frequency)) CHECK(comb.od_samples[k] == p.d0);
  }
}

TEST_CASE("finesse 1 gives a flat absorber and d_peak 0 leaves only the background") {
  const FrequencyGrid grid;
  const auto flat = build_comb(comb_params(1.4, 1.0, 0.3), grid);
  const auto bare = build_comb(comb_params(0.0, 2.0, 0.3), grid);
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const bool in = in_comb_window(flat.params, grid.frequency(k) - grid.center_frequency);
    CHECK(flat.od_samples[k] == doctest::Approx(in ? 1.7 : 0.3));
    CHECK(bare.od_samples[k] == 0.3);
  }
}

TEST_CASE("delta-like teeth occupy one sample at each multiple of delta") {
  const FrequencyGrid grid;
  auto p = comb_params(2.0, std::numeric_limits<double>::infinity(), 0.0);
  const auto comb = build_comb(p, grid);
  std::size_t hot = 0;
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    if (comb.od_samples[k] > 0.0) {
      ++hot;
      const double f = grid.frequency(k) - grid.center_frequency;
      CHECK(std::abs(f / p.delta - std::round(f / p.delta)) < 1e-9);
    }
  }
  CHECK(hot == tooth_count(p));
}

TEST_CASE("comb construction errors") {
  const FrequencyGrid grid;
  CHECK(code_of([&] { build_comb(comb_params(1, 2, 0, 0.0), grid); }) == Errc::nonpositive_delta);
  CHECK(code_of([&] { build_comb(comb_params(1, 2, 0, -5e6), grid); }) == Errc::nonpositive_delta);
  CHECK(code_of([&] { build_comb(comb_params(1, 2, 0, 4e6), grid); }) == Errc::grid_too_coarse);
  CHECK(code_of([&] { build_comb(comb_params(1, 0.5, 0), grid); }) == Errc::invalid_argument);
  CHECK(code_of([&] { build_comb(comb_params(-1, 2, 0), grid); }) == Errc::invalid_argument);
  CHECK(code_of([] { tooth_shape_from_string("triangle"); }) == Errc::invalid_argument);
}

TEST_CASE("Kramers-Kronig phase of a constant vanishes") {
  const std::vector<double> d(4096, 1.7);
  for (double phi : kramers_kronig_phase(d)) CHECK(std::abs(phi) < 1e-9);
}

TEST_CASE("Kramers-Kronig phase of a Lorentzian matches its analytic partner") {
  // d(f) = A g^2 / (f^2 + g^2); the causal partner of -d/2 is
  // phi(f) = (A/2) g f / (f^2 + g^2), which is A/4 at f = g
  const FrequencyGrid grid;
  const double A = 2.0, g = 20e6;
  std::vector<double> d(grid.n_points);
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double f = grid.frequency(k) - grid.center_frequency;
    d[k] = A * g * g / (f * f + g * g);
  }
  const auto phi = kramers_kronig_phase(d);
  for (double sign : {-1.0, 1.0}) {
    const auto k = static_cast<std::size_t>(std::llround(grid.n_points / 2.0 + sign * g / grid.resolution()));
    const double f = grid.frequency(k) - grid.center_frequency;
    const double expected = 0.5 * A * g * f / (f * f + g * g);
    CHECK(std::abs(phi[k] / expected - 1.0) < 1e-3);
  }
}

TEST_CASE("comb phase is periodic in delta away from the band edges") {
  const FrequencyGrid grid;
  const auto comb = build_comb(comb_params(1.4, 2.0, 0.5), grid);
  const auto phi = kramers_kronig_phase(comb);
  const auto shift = static_cast<std::size_t>(std::llround(comb.params.delta / grid.resolution()));
  const std::size_t c = grid.n_points / 2;
  const auto span = static_cast<std::size_t>(1e9 / grid.resolution());
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = c - span; k < c + span; ++k) {
    worst = std::max(worst, std::abs(phi[k + shift] - phi[k]));
    scale = std::max(scale, std::abs(phi[k]));
  }
  CHECK(scale > 0.05);
  CHECK(worst < 0.02 * scale);
}

TEST_CASE("non-finite optical depth is rejected") {
  std::vector<double> d(64, 0.0);
  d[10] = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { kramers_kronig_phase(d); }) == Errc::non_finite);
}

TEST_CASE("transfer function identities") {
  const FrequencyGrid grid;
  const auto clear = transfer_function(build_comb(comb_params(0.0, 2.0, 0.0), grid));
  for (const auto& h : clear.amplitude_response) CHECK(std::abs(h - 1.0) < 1e-12);

  const auto comb = build_comb(comb_params(1.4, 2.0, 0.6), grid);
  const auto t = transfer_function(comb);
  double min_abs = 1e9;
  for (std::size_t k = 0; k < grid.n_points; ++k) {
    min_abs = std::min(min_abs, std::abs(t.amplitude_response[k]));
    CHECK(std::abs(std::abs(t.amplitude_response[k]) - std::exp(-0.5 * comb.od_samples[k])) < 1e-12);
  }
  CHECK(std::abs(min_abs - std::exp(-0.5 * 2.0)) < 1e-9);

  const auto real_only = transfer_function(comb, {false});
  for (const auto& h : real_only.amplitude_response) CHECK(h.imag() == 0.0);
}

TEST_CASE("identity transfer preserves the trace (Parseval)") {
  const FrequencyGrid grid;
  const auto in = gaussian_pulse_spectrum(grid, 10e9);
  const auto t_in = input_trace(in, grid);
  const auto t_out = propagate_wavepacket(in, transfer_function(build_comb(comb_params(0.0, 2.0, 0.0), grid)));
  CHECK(std::abs(t_out.energy() - t_in.energy()) < 1e-9 * t_in.energy());
  CHECK(std::abs(t_in.energy() - t_in.input_energy) < 1e-9 * t_in.input_energy);
  for (std::size_t j = 0; j < t_in.size(); j += 97) CHECK(std::abs(t_out.amplitude[j] - t_in.amplitude[j]) < 1e-9);
}

TEST_CASE("200 MHz comb recalls a 10 GHz pulse 5 ns after the transmitted part") {
  const FrequencyGrid grid;
  const auto comb = build_comb(comb_params(1.4, 2.0, 0.5), grid);
  const auto trace = propagate_wavepacket(gaussian_pulse_spectrum(grid, 10e9), transfer_function(comb));
  const auto m = echo_metrics(trace, 200e6);
  CHECK(std::abs(m.echo_delay() - 5e-9) <= grid.time_step());
  CHECK(m.efficiency > 0.0);
  CHECK(trace.energy() <= trace.input_energy * (1 + 1e-12));
}

TEST_CASE("propagation and metric errors") {
  const FrequencyGrid grid;
  const auto t = transfer_function(build_comb(comb_params(1.0, 2.0, 0.0), grid));
  const std::vector<cd> short_spec(128, 1.0);
  CHECK(code_of([&] { propagate_wavepacket(short_spec, t); }) == Errc::grid_mismatch);
  const auto trace = propagate_wavepacket(gaussian_pulse_spectrum(grid, 2e9), t);
  CHECK(code_of([&] { echo_metrics(trace, 200e6, 1e-3); }) == Errc::window_outside_trace);
  CHECK(code_of([&] { echo_metrics(trace, 0.0); }) == Errc::nonpositive_delta);
  CHECK(code_of([&] { trace.window_energy(-1.0, 0.0); }) == Errc::window_outside_trace);
}

TEST_CASE("efficiency vanishes monotonically as d_peak goes to zero") {
  double prev = 1.0;
  for (double dp : {1.0, 0.5, 0.25, 0.1, 0.01, 0.0}) {
    const double eta = fft_efficiency(comb_params(dp, 2.0, 0.0));
    CHECK(eta < prev);
    prev = eta;
  }
  CHECK(prev < 1e-12);
  CHECK(analytic_echo_efficiency(0.0, 2.0, 0.3, ToothShape::square) == 0.0);
}

TEST_CASE("analytic efficiency tracks the propagated comb within 5 percent") {
  // square comb F=2, d=2, d0=0: the FFT value is the oracle
  const double oracle = fft_efficiency(comb_params(2.0, 2.0, 0.0));
  CHECK(std::abs(oracle / 0.14906 - 1.0) < 1e-3);
  CHECK(std::abs(analytic_echo_efficiency(2.0, 2.0, 0.0, ToothShape::square) / oracle - 1.0) < 0.05);
  for (double F : {3.0, 5.0}) {
    for (double dp : {0.5, 4.0}) {
      const double eta = fft_efficiency(comb_params(dp, F, 0.0));
      CHECK(std::abs(analytic_echo_efficiency(dp, F, 0.0, ToothShape::square) / eta - 1.0) < 0.05);
    }
  }
}

TEST_CASE("gaussian teeth are selectable and smooth") {
  const FrequencyGrid grid;
  auto p = comb_params(1.4, 2.0, 0.0);
  p.shape = ToothShape::gaussian;
  const auto comb = build_comb(p, grid);
  const auto k0 = grid.n_points / 2;
  CHECK(std::abs(comb.od_samples[k0] - 1.4) < 0.05);
  CHECK(tooth_shape_from_string(to_string(ToothShape::gaussian)) == ToothShape::gaussian);
}

}
