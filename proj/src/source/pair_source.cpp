#include "afc/source/pair_source.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "afc/error.hpp"

namespace afc::source {

void PairSourceParams::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw Error(Errc::invalid_argument, "mu must be >= 0");
  if (!(rep_rate > 0.0)) throw Error(Errc::invalid_argument, "repetition rate must be > 0");
  if (!(signal_bandwidth > 0.0)) throw Error(Errc::invalid_argument, "signal bandwidth must be > 0");
  if (!(idler_efficiency >= 0.0 && idler_efficiency <= 1.0)) {
    throw Error(Errc::invalid_argument, "idler efficiency must lie in [0, 1]");
  }
  if (modes < 1) throw Error(Errc::invalid_argument, "mode count must be >= 1");
}

void DutyCycle::validate() const {
  if (!(pump >= 0.0 && wait >= 0.0 && storage > 0.0)) {
    throw Error(Errc::invalid_argument, "duty cycle phases must be non-negative, storage > 0");
  }
}

double thermal_pmf(unsigned n, double mu, unsigned modes) {
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  const double m = modes;
  const double x = mu / m;
  // C(n+M-1, n) x^n / (1+x)^(n+M)
  const double log_binom = std::lgamma(n + m) - std::lgamma(n + 1.0) - std::lgamma(m);
  return std::exp(log_binom + n * std::log(x) - (n + m) * std::log1p(x));
}

namespace {

double success_probability(const PairSourceParams& p) { return 1.0 / (1.0 + p.mu / p.modes); }

}  // namespace

std::vector<std::uint32_t> sample_pair_emissions(const PairSourceParams& params, std::size_t n_pulses,
                                                 std::uint64_t seed) {
  params.validate();
  if (n_pulses < 1) throw Error(Errc::invalid_argument, "need at least one pulse");
  std::vector<std::uint32_t> out(n_pulses, 0);
  if (params.mu == 0.0) return out;
  std::mt19937_64 rng(seed);
  if (params.modes == 1) {
    std::geometric_distribution<std::uint32_t> dist(success_probability(params));
    for (auto& n : out) n = dist(rng);
  } else {
    std::negative_binomial_distribution<std::uint32_t> dist(params.modes, success_probability(params));
    for (auto& n : out) n = dist(rng);
  }
  return out;
}

std::vector<PairEvent> sample_pair_events(const PairSourceParams& params, std::uint64_t n_pulses,
                                          std::uint64_t seed) {
  params.validate();
  std::vector<PairEvent> out;
  if (params.mu == 0.0 || n_pulses == 0) return out;
  std::mt19937_64 rng(seed);
  const double p = success_probability(params);
  const double p_nonempty = 1.0 - std::pow(p, static_cast<double>(params.modes));
  out.reserve(static_cast<std::size_t>(1.2 * p_nonempty * static_cast<double>(n_pulses)) + 16);
  std::geometric_distribution<std::uint64_t> gap(p_nonempty);
  std::geometric_distribution<std::uint32_t> excess(p);
  std::negative_binomial_distribution<std::uint32_t> multi(params.modes, p);
  std::uint64_t pulse = gap(rng);
  while (pulse < n_pulses) {
    std::uint32_t n = 0;
    if (params.modes == 1) {
      // memoryless: n | n >= 1 is 1 + geometric
      n = 1 + excess(rng);
    } else {
      do n = multi(rng);
      while (n == 0);
    }
    out.push_back({pulse, n});
    pulse += 1 + gap(rng);
  }
  return out;
}

std::vector<std::uint32_t> apply_bandwidth_filter(std::span<const std::uint32_t> n_pairs,
                                                  double pass_fraction, std::uint64_t seed) {
  if (!(pass_fraction >= 0.0 && pass_fraction <= 1.0)) {
    throw Error(Errc::invalid_argument, "pass fraction must lie in [0, 1]");
  }
  std::vector<std::uint32_t> out(n_pairs.begin(), n_pairs.end());
  if (pass_fraction == 1.0) return out;
  std::mt19937_64 rng(seed);
  for (auto& n : out) {
    if (n == 0) continue;
    std::binomial_distribution<std::uint32_t> keep(n, pass_fraction);
    n = keep(rng);
  }
  return out;
}

std::vector<PairEvent> apply_bandwidth_filter(std::span<const PairEvent> events, double pass_fraction,
                                              std::uint64_t seed) {
  if (!(pass_fraction >= 0.0 && pass_fraction <= 1.0)) {
    throw Error(Errc::invalid_argument, "pass fraction must lie in [0, 1]");
  }
  std::vector<PairEvent> out;
  out.reserve(events.size());
  std::mt19937_64 rng(seed);
  for (const auto& e : events) {
    std::uint32_t n = e.pairs;
    if (pass_fraction < 1.0) {
      std::binomial_distribution<std::uint32_t> keep(e.pairs, pass_fraction);
      n = keep(rng);
    }
    if (n > 0) out.push_back({e.pulse, n});
  }
  return out;
}

double spectral_pass_fraction(double signal_bandwidth, double memory_bandwidth) {
  if (!(signal_bandwidth > 0.0 && memory_bandwidth >= 0.0)) {
    throw Error(Errc::invalid_argument, "bandwidths must be positive");
  }
  return std::min(1.0, memory_bandwidth / signal_bandwidth);
}

}  // namespace afc::source
