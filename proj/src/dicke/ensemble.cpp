#include "afc/dicke/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "afc/error.hpp"
#include "afc/simd/kernels.hpp"

namespace afc::dicke {

AtomEnsemble sample_ensemble(const spectral::CombProfile& comb, std::size_t n_atoms,
                             std::uint64_t seed) {
  if (n_atoms < 1000) throw Error(Errc::invalid_argument, "ensemble needs at least 1000 atoms");
  const auto& grid = comb.grid;
  const std::size_t n = comb.od_samples.size();
  if (n != grid.n_points) throw Error(Errc::grid_mismatch, "comb samples do not match grid");

  std::vector<std::size_t> cells;
  std::vector<double> cdf;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = grid.frequency(k) - grid.center_frequency;
    if (!spectral::in_comb_window(comb.params, f)) continue;
    const double p = -std::expm1(-comb.od_samples[k]);
    if (p <= 0.0) continue;
    acc += p;
    cells.push_back(k);
    cdf.push_back(acc);
  }
  if (cells.empty()) throw Error(Errc::empty_comb, "comb has no absorption inside its window");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double df = grid.resolution();
  const bool jitter = !comb.params.delta_like();

  AtomEnsemble ens;
  ens.detunings.resize(n_atoms);
  ens.weights.assign(n_atoms, 1.0 / std::sqrt(static_cast<double>(n_atoms)));
  for (std::size_t j = 0; j < n_atoms; ++j) {
    const double u = uniform(rng) * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const std::size_t k = cells[static_cast<std::size_t>(it - cdf.begin())];
    double f = grid.frequency(k) - grid.center_frequency;
    if (jitter) f += (uniform(rng) - 0.5) * df;
    ens.detunings[j] = f;
  }
  return ens;
}

void assign_positions(AtomEnsemble& ensemble, double length, double wavenumber, std::uint64_t seed) {
  if (!(length > 0.0)) throw Error(Errc::invalid_argument, "medium length must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, length);
  ensemble.positions.resize(ensemble.size());
  for (double& z : ensemble.positions) z = uniform(rng);
  ensemble.wavenumber = wavenumber;
}

namespace {

double spatial_phase(const AtomEnsemble& e, std::size_t j, bool include) {
  return include && !e.positions.empty() ? -e.wavenumber * e.positions[j] : 0.0;
}

double reference_intensity(const AtomEnsemble& e, bool include) {
  double re = 0.0, im = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const double ph = spatial_phase(e, j, include);
    re += e.weights[j] * std::cos(ph);
    im += e.weights[j] * std::sin(ph);
  }
  return re * re + im * im;
}

bool uniformly_spaced(std::span<const double> t) {
  if (t.size() < 3) return false;
  const double dt = t[1] - t[0];
  if (!(dt > 0.0)) return false;
  for (std::size_t s = 2; s < t.size(); ++s) {
    const double expect = t[0] + static_cast<double>(s) * dt;
    if (std::abs(t[s] - expect) > 1e-9 * dt) return false;
  }
  return true;
}

}  // namespace

std::vector<double> collective_reemission_intensity_direct(const AtomEnsemble& ensemble,
                                                           std::span<const double> t_samples,
                                                           bool include_spatial_phase) {
  if (ensemble.size() == 0 || ensemble.weights.size() != ensemble.size()) {
    throw Error(Errc::invalid_argument, "ensemble is empty or inconsistent");
  }
  if (include_spatial_phase && ensemble.positions.size() != ensemble.size()) {
    throw Error(Errc::invalid_argument, "spatial phase requested without positions");
  }
  const double i0 = reference_intensity(ensemble, include_spatial_phase);
  std::vector<double> out(t_samples.size());
  for (std::size_t s = 0; s < t_samples.size(); ++s) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < ensemble.size(); ++j) {
      const double ph = 2.0 * std::numbers::pi * ensemble.detunings[j] * t_samples[s] +
                        spatial_phase(ensemble, j, include_spatial_phase);
      re += ensemble.weights[j] * std::cos(ph);
      im += ensemble.weights[j] * std::sin(ph);
    }
    out[s] = (re * re + im * im) / i0;
  }
  return out;
}

std::vector<double> collective_reemission_intensity(const AtomEnsemble& ensemble,
                                                    std::span<const double> t_samples,
                                                    const ReemissionOptions& options) {
  if (!uniformly_spaced(t_samples)) {
    return collective_reemission_intensity_direct(ensemble, t_samples, options.include_spatial_phase);
  }
  if (ensemble.size() == 0 || ensemble.weights.size() != ensemble.size()) {
    throw Error(Errc::invalid_argument, "ensemble is empty or inconsistent");
  }
  if (options.include_spatial_phase && ensemble.positions.size() != ensemble.size()) {
    throw Error(Errc::invalid_argument, "spatial phase requested without positions");
  }
  const std::size_t n_atoms = ensemble.size();
  const std::size_t n_t = t_samples.size();
  const double t0 = t_samples[0];
  const double dt = t_samples[1] - t_samples[0];
  const double i0 = reference_intensity(ensemble, options.include_spatial_phase);

  std::vector<double> rot_re(n_atoms), rot_im(n_atoms);
  for (std::size_t j = 0; j < n_atoms; ++j) {
    const double w = 2.0 * std::numbers::pi * ensemble.detunings[j] * dt;
    rot_re[j] = std::cos(w);
    rot_im[j] = std::sin(w);
  }

  std::vector<double> out(n_t);
  const std::size_t n_blocks = (n_t + kAnchorInterval - 1) / kAnchorInterval;
  const auto& kernels = simd::active_kernels();

  auto run_blocks = [&](std::size_t b_begin, std::size_t b_end) {
    std::vector<double> re(n_atoms), im(n_atoms);
    for (std::size_t b = b_begin; b < b_end; ++b) {
      const std::size_t s0 = b * kAnchorInterval;
      const double t_anchor = t0 + static_cast<double>(s0) * dt;
      for (std::size_t j = 0; j < n_atoms; ++j) {
        const double ph = 2.0 * std::numbers::pi * ensemble.detunings[j] * t_anchor +
                          spatial_phase(ensemble, j, options.include_spatial_phase);
        re[j] = std::cos(ph);
        im[j] = std::sin(ph);
      }
      const std::size_t s1 = std::min(n_t, s0 + kAnchorInterval);
      for (std::size_t s = s0; s < s1; ++s) {
        const simd::PhasorSum sum = kernels.phasor_step(ensemble.weights.data(), re.data(), im.data(),
                                                        rot_re.data(), rot_im.data(), n_atoms);
        out[s] = (sum.re * sum.re + sum.im * sum.im) / i0;
      }
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(n_blocks, 1));
  if (threads == 1) {
    run_blocks(0, n_blocks);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t per = (n_blocks + threads - 1) / threads;
    for (std::size_t w = 0; w < threads; ++w) {
      const std::size_t lo = w * per, hi = std::min(n_blocks, lo + per);
      if (lo < hi) pool.emplace_back(run_blocks, lo, hi);
    }
  }
  return out;
}

}  // namespace afc::dicke
