#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace afc::source {

/// FWHM = 2 sqrt(2 ln 2) sigma
double fwhm_to_sigma(double fwhm);

struct DetectorParams {
  double efficiency = 0.6;
  double jitter_sigma = 0.0;  // s
  double dark_rate = 0.0;     // Hz
  double dead_time = 0.0;     // s

  void validate() const;

  static DetectorParams from_fwhm(double efficiency, double jitter_fwhm, double dark_rate, double dead_time);
  /// 795 nm herald detector: 60 %, 600 ps FWHM jitter.
  static DetectorParams si_apd();
  /// 1532 nm analyzer detector: 60 %, 350 ps FWHM jitter.
  static DetectorParams snspd();
  /// Unit efficiency, no jitter, no darks, no dead time.
  static DetectorParams ideal();
};

struct PhotonArrival {
  double time = 0.0;
  std::int64_t pulse = -1;
  double efficiency_multiplier = 1.0;  // e.g. polarization dependence, memory loss
};

/// Click record of one channel. pulse_index is -1 for dark counts.
struct TimeTagStream {
  std::uint32_t channel = 0;
  std::vector<double> times;
  std::vector<std::int64_t> pulse_index;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

/// Thinning, jitter, Poisson darks over [0, duration), then dead time.
/// Output times are strictly increasing.
TimeTagStream detect_stream(std::span<const PhotonArrival> photons, const DetectorParams& params,
                            double duration, std::uint64_t seed, std::uint32_t channel = 0);

struct Histogram {
  double bin_width = 80e-12;
  double t_min = 0.0;  // left edge of bin 0
  std::vector<std::uint64_t> counts;

  double bin_center(std::size_t i) const { return t_min + (static_cast<double>(i) + 0.5) * bin_width; }
  /// Index of the bin containing t, or -1 when outside.
  std::ptrdiff_t bin_index(double t) const;
  std::uint64_t total() const;
  /// Sum of n_bins consecutive bins centred on the bin holding t_center.
  std::uint64_t window_sum(double t_center, std::size_t n_bins) const;
  /// Count-weighted mean bin centre over [lo, hi).
  double centroid(double lo, double hi) const;
};

/// Start-stop histogram of signal-minus-reference times over every pair with
/// difference in [t_lo, t_hi). Bins are centred on integer multiples of bin.
Histogram tdc_histogram(const TimeTagStream& signal, std::span<const double> reference, double bin,
                        double t_lo, double t_hi);

}  // namespace afc::source
