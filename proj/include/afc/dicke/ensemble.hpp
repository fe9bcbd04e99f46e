#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "afc/spectral/comb.hpp"

namespace afc::dicke {

/// Discrete atoms of the collective single-excitation state: atom j carries
/// amplitude weights[j] and accumulates phase 2 pi detunings[j] t. Positions
/// are optional; in the phase-matched forward direction the spatial factor
/// exp(-i k z_j) is common to emission and absorption and cancels.
struct AtomEnsemble {
  std::vector<double> detunings;  // Hz
  std::vector<double> weights;    // sum of squares = 1
  std::vector<double> positions;  // m, empty unless position mode is used
  double wavenumber = 0.0;        // rad/m, used with positions

  std::size_t size() const { return detunings.size(); }
};

/// Draws n_atoms detunings with density proportional to 1 - exp(-d(f)) inside
/// the comb window, uniform weights. Requires n_atoms >= 1000.
/// Errors: empty-comb (no absorption anywhere in the window), invalid-argument.
AtomEnsemble sample_ensemble(const spectral::CombProfile& comb, std::size_t n_atoms,
                             std::uint64_t seed);

/// Places atoms uniformly along [0, length) for the position mode.
void assign_positions(AtomEnsemble& ensemble, double length, double wavenumber, std::uint64_t seed);

struct ReemissionOptions {
  bool include_spatial_phase = false;
  std::size_t threads = 1;  // splits time blocks; results do not depend on it
};

/// I(t) = |sum_j c_j exp(i 2 pi delta_j t)|^2 / I(0). Uniformly spaced times
/// use a phasor recurrence (re-anchored every kAnchorInterval steps) on the
/// active SIMD kernel; other time sets are summed directly.
std::vector<double> collective_reemission_intensity(const AtomEnsemble& ensemble,
                                                    std::span<const double> t_samples,
                                                    const ReemissionOptions& options = {});

/// Same quantity evaluated with std::cos / std::sin per (atom, time); slow,
/// used as the reference the fast path is checked against.
std::vector<double> collective_reemission_intensity_direct(const AtomEnsemble& ensemble,
                                                           std::span<const double> t_samples,
                                                           bool include_spatial_phase = false);

inline constexpr std::size_t kAnchorInterval = 64;

}  // namespace afc::dicke
