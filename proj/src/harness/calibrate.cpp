#include "afc/harness/calibrate.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdint>

#include "afc/analysis/g2.hpp"
#include "afc/error.hpp"
#include "afc/spectral/transfer.hpp"

namespace afc::harness {

MemoryResponse simulate_memory(const ExperimentConfig& cfg, const spectral::CombParams& params) {
  MemoryResponse r;
  r.comb = spectral::build_comb(params, cfg.grid);
  const auto transfer = spectral::transfer_function(r.comb, {cfg.echo.dispersion});
  const auto input = spectral::gaussian_pulse_spectrum(cfg.grid, cfg.echo.pulse_fwhm);
  r.trace = spectral::propagate_wavepacket(input, transfer, {cfg.echo.coherence_time});
  r.metrics = spectral::echo_metrics(r.trace, params.delta);
  return r;
}

namespace {

struct Solved {
  double x = 0.0;
  int evaluations = 0;
};

template <class F>
Solved solve(F f, double lo, double hi) {
  std::uintmax_t it = 100;
  auto tol = boost::math::tools::eps_tolerance<double>(40);
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, it);
  return {0.5 * (a + b), static_cast<int>(it)};
}

}  // namespace

CombCalibration calibrate_comb(const ExperimentConfig& cfg, double target) {
  CombCalibration out;
  out.target = target;
  spectral::CombParams p = cfg.comb;
  int evals = 0;
  auto eta = [&](const spectral::CombParams& q) {
    ++evals;
    return simulate_memory(cfg, q).metrics.efficiency;
  };

  if (target <= 0.0) {
    p.d_peak = 0.0;
    out.branch = "zero";
  } else {
    spectral::CombParams q = p;
    q.d0 = 0.0;
    const double eta_clean = eta(q);
    if (target <= eta_clean) {
      out.branch = "background";
      auto f = [&](double d0) {
        spectral::CombParams r = p;
        r.d0 = d0;
        return eta(r) - target;
      };
      const double hi = 20.0;
      if (f(hi) > 0.0) throw Error(Errc::target_unreachable, "target below the efficiency at d0 = 20");
      p.d0 = target == eta_clean ? 0.0 : solve(f, 0.0, hi).x;
    } else {
      out.branch = "peak";
      q = p;
      q.d0 = 0.0;
      auto neg = [&](double d) {
        spectral::CombParams r = q;
        r.d_peak = d;
        return -eta(r);
      };
      const auto [d_opt, neg_max] = boost::math::tools::brent_find_minima(neg, 0.0, 20.0, 30);
      if (target > -neg_max) {
        throw Error(Errc::target_unreachable, "target exceeds the largest efficiency the comb can reach");
      }
      auto f = [&](double d) { return -neg(d) - target; };
      q.d_peak = solve(f, 0.0, d_opt).x;
      p = q;
    }
  }
  out.d_peak = p.d_peak;
  out.d0 = p.d0;
  out.efficiency = eta(p);
  out.residual = out.efficiency - target;
  out.evaluations = evals;
  return out;
}

double window_capture(double window, double sigma_a, double sigma_b) {
  const double s = std::hypot(sigma_a, sigma_b);
  if (s == 0.0) return 1.0;
  return std::erf(0.5 * window / (std::sqrt(2.0) * s));
}

double chain_bypass_g2(const ExperimentConfig& cfg, double mu) {
  const auto& h = cfg.herald_detector;
  const auto& s = cfg.signal_detector;
  const double gate = cfg.coincidence_window;
  const double dark_s = s.dark_rate * gate;
  const double dark_i = h.dark_rate / cfg.source.rep_rate;
  const auto m = analysis::click_model(mu, s.efficiency * window_capture(gate, s.jitter_sigma, 0.0),
                                       h.efficiency, cfg.source.modes, dark_s, dark_i);
  const double capture = window_capture(gate, s.jitter_sigma, h.jitter_sigma);
  // correlated part of p_si loses the window tails; the accidental p_s p_i part does not
  return (capture * (m.p_si - m.p_s * m.p_i) + m.p_s * m.p_i) / (m.p_s * m.p_i);
}

MuCalibration calibrate_mu(const ExperimentConfig& cfg, double target_g2) {
  if (!(target_g2 > 1.0)) throw Error(Errc::target_unreachable, "g2 target must exceed 1");
  MuCalibration out;
  out.target_g2 = target_g2;
  out.mu_ideal = 1.0 / (target_g2 - 1.0);
  auto f = [&](double mu) { return chain_bypass_g2(cfg, mu) - target_g2; };
  const double lo = 1e-6, hi = 50.0;
  if (f(lo) < 0.0 || f(hi) > 0.0) {
    throw Error(Errc::target_unreachable, "detector chain cannot reach the requested g2");
  }
  out.mu_chain = solve(f, lo, hi).x;
  out.chain_g2 = chain_bypass_g2(cfg, out.mu_chain);
  out.chain_residual = out.chain_g2 - target_g2;
  return out;
}

}  // namespace afc::harness
