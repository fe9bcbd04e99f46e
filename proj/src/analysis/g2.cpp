#include "afc/analysis/g2.hpp"

#include <cmath>
#include <numeric>

#include "afc/error.hpp"

namespace afc::analysis {

G2Estimate estimate_g2(const source::CoincidenceSet& c) {
  if (c.n_s == 0 || c.n_i == 0) throw Error(Errc::zero_singles, "g2 needs non-zero singles");
  if (c.n_pulses == 0) throw Error(Errc::invalid_argument, "g2 needs the pulse count");
  const double nsi = static_cast<double>(c.n_si);
  const double ns = static_cast<double>(c.n_s);
  const double ni = static_cast<double>(c.n_i);
  G2Estimate e;
  e.g2 = nsi * static_cast<double>(c.n_pulses) / (ns * ni);
  const double rel2 = (c.n_si > 0 ? 1.0 / nsi : 0.0) + 1.0 / ns + 1.0 / ni;
  e.std_error = e.g2 * std::sqrt(rel2);
  return e;
}

G2Estimate estimate_g2_side_peaks(std::uint64_t n_central, std::span<const std::uint64_t> side_peaks) {
  if (side_peaks.empty()) throw Error(Errc::invalid_argument, "no side peaks");
  const double total = std::accumulate(side_peaks.begin(), side_peaks.end(), 0.0);
  if (total <= 0.0) throw Error(Errc::zero_singles, "side peaks are empty");
  const double acc = total / static_cast<double>(side_peaks.size());
  G2Estimate e;
  e.g2 = static_cast<double>(n_central) / acc;
  const double rel2 = (n_central > 0 ? 1.0 / static_cast<double>(n_central) : 0.0) + 1.0 / total;
  e.std_error = e.g2 * std::sqrt(rel2);
  return e;
}

ClickModel click_model(double mu, double eta_s, double eta_i, unsigned modes, double dark_s, double dark_i) {
  if (!(mu >= 0.0) || modes < 1) throw Error(Errc::invalid_argument, "mu >= 0 and modes >= 1 required");
  const double m = modes;
  // probability generating function of the pair number evaluated at z
  auto pgf = [&](double z) { return std::pow(1.0 + mu * (1.0 - z) / m, -m); };
  const double none_s = (1.0 - dark_s) * pgf(1.0 - eta_s);
  const double none_i = (1.0 - dark_i) * pgf(1.0 - eta_i);
  const double none_both = (1.0 - dark_s) * (1.0 - dark_i) * pgf((1.0 - eta_s) * (1.0 - eta_i));
  ClickModel c;
  c.p_s = 1.0 - none_s;
  c.p_i = 1.0 - none_i;
  c.p_si = 1.0 - none_s - none_i + none_both;
  return c;
}

}  // namespace afc::analysis
