#pragma once

#include <cstddef>
#include <limits>
#include <string_view>
#include <vector>

#include "afc/spectral/grid.hpp"

namespace afc::spectral {

enum class ToothShape { square, gaussian };

std::string_view to_string(ToothShape shape);
ToothShape tooth_shape_from_string(std::string_view name);

/// Atomic frequency comb geometry. Teeth are centred on integer multiples of
/// delta (relative to the grid centre) and the comb occupies the half-open
/// window [-bandwidth/2, bandwidth/2). Outside it only the background d0
/// remains. finesse = +inf gives one-sample (delta-like) teeth.
struct CombParams {
  double delta = 200e6;       // tooth spacing, Hz
  double finesse = 2.0;       // spacing / tooth width
  double d_peak = 1.4;        // optical depth of a tooth above background
  double d0 = 0.8;            // background optical depth
  double bandwidth = 8e9;     // Hz
  ToothShape shape = ToothShape::square;

  double tooth_width() const { return delta / finesse; }
  bool delta_like() const { return finesse == std::numeric_limits<double>::infinity(); }
};

struct CombProfile {
  CombParams params;
  FrequencyGrid grid;
  std::vector<double> od_samples;  // optical depth d(f) >= 0
};

/// Errors: nonpositive-delta, grid-too-coarse (resolution > delta/16),
/// invalid-argument (finesse < 1, negative depths, nonpositive bandwidth).
CombProfile build_comb(const CombParams& params, const FrequencyGrid& grid);

/// Number of tooth centres inside the comb window.
std::size_t tooth_count(const CombParams& params);

/// True when grid sample k lies inside the comb window.
bool in_comb_window(const CombParams& params, double detuning);

}  // namespace afc::spectral
