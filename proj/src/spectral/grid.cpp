#include "afc/spectral/grid.hpp"

#include <bit>
#include <cmath>

#include "afc/error.hpp"

namespace afc::spectral {

std::vector<double> FrequencyGrid::frequencies() const {
  std::vector<double> f(n_points);
  for (std::size_t k = 0; k < n_points; ++k) f[k] = frequency(k);
  return f;
}

void FrequencyGrid::validate() const {
  if (!(span > 0.0) || !std::isfinite(span)) {
    throw Error(Errc::invalid_argument, "frequency grid span must be positive");
  }
  if (n_points < (std::size_t{1} << 10) || !std::has_single_bit(n_points)) {
    throw Error(Errc::invalid_argument, "frequency grid needs a power-of-two size >= 1024");
  }
}

}  // namespace afc::spectral
