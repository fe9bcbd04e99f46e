#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace afc::source {

struct PairSourceParams {
  double mu = 1.0 / 13.1;       // mean pairs per pulse
  double rep_rate = 80e6;       // Hz
  double signal_bandwidth = 10e9;
  double idler_efficiency = 1.0;  // herald-arm transmission ahead of the detector
  unsigned modes = 1;           // thermal modes; 1 = single-mode thermal

  void validate() const;
  double pulse_period() const { return 1.0 / rep_rate; }
};

/// P(n) for M-mode thermal statistics (negative binomial with mean mu).
double thermal_pmf(unsigned n, double mu, unsigned modes = 1);

/// Per-pulse pair numbers.
std::vector<std::uint32_t> sample_pair_emissions(const PairSourceParams& params, std::size_t n_pulses,
                                                 std::uint64_t seed);

/// Pulses that carry at least one pair, in increasing pulse order. Same law as
/// sample_pair_emissions but only touches the non-empty slots, which is what
/// long runs at mu << 1 need.
struct PairEvent {
  std::uint64_t pulse = 0;
  std::uint32_t pairs = 0;
};
std::vector<PairEvent> sample_pair_events(const PairSourceParams& params, std::uint64_t n_pulses,
                                          std::uint64_t seed);

/// Independent binomial thinning with keep probability pass_fraction.
std::vector<std::uint32_t> apply_bandwidth_filter(std::span<const std::uint32_t> n_pairs,
                                                  double pass_fraction, std::uint64_t seed);
std::vector<PairEvent> apply_bandwidth_filter(std::span<const PairEvent> events, double pass_fraction,
                                              std::uint64_t seed);

/// Fraction of a flat-top source spectrum inside the memory bandwidth.
double spectral_pass_fraction(double signal_bandwidth, double memory_bandwidth);

/// Pump / wait / storage cycle of the memory (seconds).
struct DutyCycle {
  double pump = 0.5;
  double wait = 0.3;
  double storage = 0.7;

  double period() const { return pump + wait + storage; }
  double storage_fraction() const { return storage / period(); }
  void validate() const;
};

}  // namespace afc::source
