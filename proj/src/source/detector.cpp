#include "afc/source/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "afc/error.hpp"

namespace afc::source {

double fwhm_to_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))); }

void DetectorParams::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw Error(Errc::invalid_argument, "detector efficiency must lie in [0, 1]");
  }
  if (!(jitter_sigma >= 0.0 && dark_rate >= 0.0 && dead_time >= 0.0)) {
    throw Error(Errc::invalid_argument, "jitter, dark rate and dead time must be >= 0");
  }
}

DetectorParams DetectorParams::from_fwhm(double efficiency, double jitter_fwhm, double dark_rate,
                                         double dead_time) {
  DetectorParams p{efficiency, fwhm_to_sigma(jitter_fwhm), dark_rate, dead_time};
  p.validate();
  return p;
}

DetectorParams DetectorParams::si_apd() { return from_fwhm(0.6, 600e-12, 100.0, 50e-9); }
DetectorParams DetectorParams::snspd() { return from_fwhm(0.6, 350e-12, 40.0, 20e-9); }
DetectorParams DetectorParams::ideal() { return {1.0, 0.0, 0.0, 0.0}; }

TimeTagStream detect_stream(std::span<const PhotonArrival> photons, const DetectorParams& params,
                            double duration, std::uint64_t seed, std::uint32_t channel) {
  params.validate();
  if (!(duration > 0.0)) throw Error(Errc::invalid_argument, "duration must be > 0");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, 1.0);

  std::vector<double> t;
  std::vector<std::int64_t> idx;
  t.reserve(photons.size());
  idx.reserve(photons.size());
  for (const auto& ph : photons) {
    const double p = params.efficiency * ph.efficiency_multiplier;
    if (p < 1.0 && !(uni(rng) < p)) continue;
    const double dt = params.jitter_sigma > 0.0 ? params.jitter_sigma * jitter(rng) : 0.0;
    t.push_back(ph.time + dt);
    idx.push_back(ph.pulse);
  }
  if (params.dark_rate > 0.0) {
    std::poisson_distribution<std::uint64_t> n_dark(params.dark_rate * duration);
    const std::uint64_t n = n_dark(rng);
    for (std::uint64_t k = 0; k < n; ++k) {
      t.push_back(duration * uni(rng));
      idx.push_back(-1);
    }
  }

  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });

  TimeTagStream out;
  out.channel = channel;
  out.times.reserve(t.size());
  out.pulse_index.reserve(t.size());
  for (std::size_t k : order) {
    if (!out.times.empty()) {
      const double gap = t[k] - out.times.back();
      if (!(gap > 0.0) || gap < params.dead_time) continue;
    }
    out.times.push_back(t[k]);
    out.pulse_index.push_back(idx[k]);
  }
  return out;
}

std::ptrdiff_t Histogram::bin_index(double t) const {
  const double x = std::floor((t - t_min) / bin_width);
  if (x < 0.0 || x >= static_cast<double>(counts.size())) return -1;
  return static_cast<std::ptrdiff_t>(x);
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t Histogram::window_sum(double t_center, std::size_t n_bins) const {
  const std::ptrdiff_t c = bin_index(t_center);
  if (c < 0 || n_bins == 0) return 0;
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(n_bins / 2);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, c - half);
  const std::ptrdiff_t hi =
      std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(counts.size()), lo + static_cast<std::ptrdiff_t>(n_bins));
  std::uint64_t s = 0;
  for (std::ptrdiff_t i = lo; i < hi; ++i) s += counts[static_cast<std::size_t>(i)];
  return s;
}

double Histogram::centroid(double lo, double hi) const {
  double w = 0.0, wt = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double c = bin_center(i);
    if (c < lo || c >= hi) continue;
    w += static_cast<double>(counts[i]);
    wt += static_cast<double>(counts[i]) * c;
  }
  return w > 0.0 ? wt / w : std::nan("");
}

Histogram tdc_histogram(const TimeTagStream& signal, std::span<const double> reference, double bin,
                        double t_lo, double t_hi) {
  if (!(bin > 0.0)) throw Error(Errc::invalid_argument, "bin width must be > 0");
  if (!(t_hi > t_lo)) throw Error(Errc::invalid_argument, "histogram range is empty");
  Histogram h;
  h.bin_width = bin;
  const double first = std::floor(t_lo / bin + 0.5);
  const double last = std::ceil(t_hi / bin - 0.5);
  h.t_min = (first - 0.5) * bin;
  h.counts.assign(static_cast<std::size_t>(last - first) + 1, 0);

  // both sequences are time-ordered; slide a window of candidate references
  std::size_t start = 0;
  for (double ts : signal.times) {
    while (start < reference.size() && ts - reference[start] >= t_hi) ++start;
    for (std::size_t r = start; r < reference.size(); ++r) {
      const double dt = ts - reference[r];
      if (dt < t_lo) break;
      const std::ptrdiff_t b = h.bin_index(dt);
      if (b >= 0 && dt < t_hi) ++h.counts[static_cast<std::size_t>(b)];
    }
  }
  return h;
}

}  // namespace afc::source
