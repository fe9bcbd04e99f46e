#include "afc/polarization/memory.hpp"

#include <cmath>
#include <random>

#include "afc/error.hpp"

namespace afc::pol {

JonesMatrix memory_polarization_operator(const MemoryPolarizationParams& p, std::uint64_t seed) {
  if (!(p.contrast >= 0.0 && p.contrast < 1.0)) {
    throw Error(Errc::invalid_argument, "hole-burning contrast must lie in [0, 1)");
  }
  if (!(p.drift_amplitude >= 0.0 && p.drift_amplitude < 1.0)) {
    throw Error(Errc::invalid_argument, "drift amplitude must lie in [0, 1)");
  }
  if (!(p.eta_max > 0.0 && p.eta_max <= 1.0)) {
    throw Error(Errc::invalid_argument, "peak efficiency must lie in (0, 1]");
  }
  if (p.scrambled) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5 * p.drift_amplitude, 0.5 * p.drift_amplitude);
    const double gain = p.drift_amplitude > 0.0 ? u(rng) : 0.0;
    const double amp = std::sqrt(p.eta_max * (1.0 + gain));
    return {amp * Eigen::Matrix2cd::Identity(), MatrixKind::diattenuator};
  }
  const Eigen::Vector2cd a = p.pump_state.normalized().vec();
  const Eigen::Vector2cd b = orthogonal(p.pump_state.normalized()).vec();
  const Eigen::Matrix2cd m = std::sqrt(p.eta_max) * (a * a.adjoint()) +
                             std::sqrt(p.eta_max * (1.0 - p.contrast)) * (b * b.adjoint());
  return {m, MatrixKind::diattenuator};
}

}  // namespace afc::pol
