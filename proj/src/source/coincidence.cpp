#include "afc/source/coincidence.hpp"

#include <cmath>
#include <vector>

#include "afc/error.hpp"

namespace afc::source {

CoincidenceSet coincide(const TimeTagStream& herald, const TimeTagStream& signal, double window,
                        double expected_delay, const CoincidenceOptions& opts) {
  if (!(window > 0.0)) throw Error(Errc::invalid_argument, "coincidence window must be > 0");
  const double half = 0.5 * window;

  CoincidenceSet out;
  out.window = window;
  out.n_pulses = opts.n_pulses;
  out.n_i = herald.size();
  std::vector<char> in_gate(signal.size(), 1);
  if (opts.pulse_period > 0.0) {
    for (std::size_t k = 0; k < signal.size(); ++k) {
      const double x = signal.times[k] - expected_delay;
      const double phase = x - opts.pulse_period * std::nearbyint(x / opts.pulse_period);
      in_gate[k] = std::abs(phase) <= half;
    }
  }
  for (char g : in_gate) out.n_s += g ? 1 : 0;

  std::size_t j = 0;
  for (double th : herald.times) {
    const double lo = th + expected_delay - half;
    const double hi = th + expected_delay + half;
    while (j < signal.size() && signal.times[j] < lo) ++j;
    for (std::size_t k = j; k < signal.size() && signal.times[k] <= hi; ++k) {
      if (!in_gate[k]) continue;
      ++out.n_si;
      // consume everything up to the match so it cannot pair twice
      j = k + 1;
      break;
    }
  }
  return out;
}

}  // namespace afc::source
