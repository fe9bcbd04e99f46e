#include "afc/spectral/comb.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "afc/error.hpp"

namespace afc::spectral {

std::string_view to_string(ToothShape shape) {
  return shape == ToothShape::square ? "square" : "gaussian";
}

ToothShape tooth_shape_from_string(std::string_view name) {
  if (name == "square") return ToothShape::square;
  if (name == "gaussian") return ToothShape::gaussian;
  throw Error(Errc::invalid_argument, "unknown tooth shape '" + std::string(name) + "'");
}

bool in_comb_window(const CombParams& params, double detuning) {
  return detuning >= -0.5 * params.bandwidth && detuning < 0.5 * params.bandwidth;
}

std::size_t tooth_count(const CombParams& params) {
  // centres m*delta with -B/2 <= m*delta < B/2
  const double half = 0.5 * params.bandwidth / params.delta;
  const auto lo = static_cast<long long>(std::ceil(-half));
  auto hi = static_cast<long long>(std::floor(half));
  if (static_cast<double>(hi) >= half) --hi;
  return hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0;
}

namespace {

void validate(const CombParams& p, const FrequencyGrid& grid) {
  grid.validate();
  if (!(p.delta > 0.0) || !std::isfinite(p.delta)) {
    throw Error(Errc::nonpositive_delta, "tooth spacing must be positive");
  }
  if (!(p.finesse >= 1.0)) throw Error(Errc::invalid_argument, "finesse must be >= 1");
  if (!(p.d_peak >= 0.0) || !(p.d0 >= 0.0) || !std::isfinite(p.d_peak) || !std::isfinite(p.d0)) {
    throw Error(Errc::invalid_argument, "optical depths must be finite and non-negative");
  }
  if (!(p.bandwidth > 0.0)) throw Error(Errc::invalid_argument, "comb bandwidth must be positive");
  if (grid.resolution() > p.delta / 16.0) {
    throw Error(Errc::grid_too_coarse, "grid resolution " + std::to_string(grid.resolution()) +
                                           " Hz exceeds delta/16");
  }
}

}  // namespace

CombProfile build_comb(const CombParams& params, const FrequencyGrid& grid) {
  validate(params, grid);
  CombProfile comb{params, grid, std::vector<double>(grid.n_points, params.d0)};
  const double df = grid.resolution();
  const double half_width_frac = params.delta_like() ? 0.0 : 0.5 / params.finesse;
  // Teeth narrower than one grid cell collapse onto their nearest sample.
  const bool one_sample = params.delta_like() || params.tooth_width() < df;
  const double sigma = params.tooth_width() / (2.0 * std::sqrt(2.0 * std::numbers::ln2));

  for (std::size_t k = 0; k < grid.n_points; ++k) {
    const double f = grid.frequency(k) - grid.center_frequency;
    if (!in_comb_window(params, f)) continue;
    const double x = f / params.delta;
    const double m = std::floor(x + 0.5);
    const double phase = x - m;  // in [-0.5, 0.5)
    double tooth = 0.0;
    if (one_sample) {
      const double dist = std::abs(f - m * params.delta);
      tooth = (dist < 0.5 * df || (dist == 0.5 * df && f < m * params.delta)) ? 1.0 : 0.0;
    } else if (params.shape == ToothShape::square) {
      tooth = (phase >= -half_width_frac && phase < half_width_frac) ? 1.0 : 0.0;
    } else {
      for (int j = -2; j <= 2; ++j) {
        const double u = f - (m + j) * params.delta;
        tooth += std::exp(-0.5 * u * u / (sigma * sigma));
      }
    }
    comb.od_samples[k] = params.d0 + params.d_peak * tooth;
  }
  return comb;
}

}  // namespace afc::spectral
