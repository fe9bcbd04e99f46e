#pragma once

#include <cstdint>

#include "afc/polarization/jones.hpp"

namespace afc::pol {

/// Polarization response of the prepared memory.
///
/// Without scrambling the comb is burnt preferentially for the pump
/// polarization: amplitude sqrt(eta_max) along pump_state and
/// sqrt(eta_max (1 - contrast)) orthogonal to it. With scrambling the
/// response is isotropic, sqrt(eta_max (1 + u)), where u ~ U[-drift/2, drift/2]
/// is redrawn per run to represent slow pump-laser drift.
struct MemoryPolarizationParams {
  bool scrambled = false;
  JonesVector pump_state = horizontal();
  double contrast = 0.25;
  double drift_amplitude = 0.07;
  double eta_max = 1.0;
};

/// Errors: invalid-argument (contrast or drift outside [0, 1), eta_max
/// outside (0, 1]).
JonesMatrix memory_polarization_operator(const MemoryPolarizationParams& params, std::uint64_t seed);

}  // namespace afc::pol
