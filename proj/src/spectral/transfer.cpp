#include "afc/spectral/transfer.hpp"

#include <cmath>

#include "afc/error.hpp"
#include "afc/spectral/fft.hpp"

namespace afc::spectral {

std::vector<double> kramers_kronig_phase(std::span<const double> optical_depth) {
  const std::size_t n = optical_depth.size();
  if (n == 0) return {};
  for (double d : optical_depth) {
    if (!std::isfinite(d)) throw Error(Errc::non_finite, "optical depth sample is not finite");
  }
  const double baseline = 0.5 * (optical_depth.front() + optical_depth.back());
  const std::size_t m = kHilbertPadFactor * n;

  std::vector<std::complex<double>> buf(m, 0.0);
  for (std::size_t k = 0; k < n; ++k) buf[k] = -0.5 * (optical_depth[k] - baseline);

  // Delay-domain representation of log H; keep only non-negative delays.
  fft_inplace(buf, FftDirection::backward);
  const double inv_m = 1.0 / static_cast<double>(m);
  buf[0] *= inv_m;
  buf[m / 2] *= inv_m;
  for (std::size_t j = 1; j < m / 2; ++j) buf[j] *= 2.0 * inv_m;
  for (std::size_t j = m / 2 + 1; j < m; ++j) buf[j] = 0.0;
  fft_inplace(buf, FftDirection::forward);

  std::vector<double> phase(n);
  for (std::size_t k = 0; k < n; ++k) phase[k] = buf[k].imag();
  return phase;
}

std::vector<double> kramers_kronig_phase(const CombProfile& comb) {
  return kramers_kronig_phase(std::span<const double>(comb.od_samples));
}

SpectralTransfer transfer_function(const CombProfile& comb, const TransferOptions& options) {
  const std::size_t n = comb.od_samples.size();
  if (n != comb.grid.n_points) throw Error(Errc::grid_mismatch, "comb samples do not match grid");
  std::vector<double> phase = options.dispersion ? kramers_kronig_phase(comb)
                                                 : std::vector<double>(n, 0.0);
  SpectralTransfer out{comb.grid, std::vector<std::complex<double>>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.amplitude_response[k] = std::polar(std::exp(-0.5 * comb.od_samples[k]), phase[k]);
  }
  return out;
}

}  // namespace afc::spectral
