#pragma once

#include <cstddef>
#include <vector>

namespace afc::spectral {

/// Uniform detuning axis. Sample k sits at
///   center_frequency - span/2 + k * span/n_points
/// so the carrier (zero detuning) is sample n_points/2. The conjugate time
/// axis has step 1/span and length n_points/span.
struct FrequencyGrid {
  double center_frequency = 0.0;  // Hz
  double span = 32.768e9;         // Hz
  std::size_t n_points = std::size_t{1} << 16;

  double resolution() const { return span / static_cast<double>(n_points); }
  double time_step() const { return 1.0 / span; }
  double time_window() const { return static_cast<double>(n_points) / span; }
  double frequency(std::size_t k) const {
    return center_frequency - 0.5 * span + static_cast<double>(k) * resolution();
  }
  std::vector<double> frequencies() const;

  /// Throws Errc::invalid_argument unless span > 0 and n_points is a power of
  /// two no smaller than 2^10.
  void validate() const;

  bool operator==(const FrequencyGrid&) const = default;
};

}  // namespace afc::spectral
