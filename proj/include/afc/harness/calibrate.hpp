#pragma once

#include <string>

#include "afc/harness/config.hpp"
#include "afc/spectral/propagate.hpp"

namespace afc::harness {

/// Comb, transfer function and propagated single-photon trace for cfg.
struct MemoryResponse {
  spectral::CombProfile comb;
  spectral::TemporalTrace trace;
  spectral::EchoMetrics metrics;
};
MemoryResponse simulate_memory(const ExperimentConfig& cfg, const spectral::CombParams& comb);
inline MemoryResponse simulate_memory(const ExperimentConfig& cfg) { return simulate_memory(cfg, cfg.comb); }

struct CombCalibration {
  double target = 0.0;
  double d_peak = 0.0;
  double d0 = 0.0;
  double efficiency = 0.0;
  double residual = 0.0;  // efficiency - target
  std::string branch;     // background | peak | zero
  int evaluations = 0;
};

/// Finds a comb reaching the target recall efficiency. With d_peak held at
/// its configured value the background d0 is solved on [0, 20]; if even
/// d0 = 0 falls short, d0 is fixed at 0 and d_peak is solved on the rising
/// side of the efficiency maximum; target 0 selects d_peak = 0.
/// Errors: target-unreachable.
CombCalibration calibrate_comb(const ExperimentConfig& cfg, double target);

struct MuCalibration {
  double target_g2 = 0.0;
  double mu_ideal = 0.0;      // unit-efficiency herald: g2 = 1 + 1/mu
  double mu_chain = 0.0;      // real detectors and gate losses
  double chain_g2 = 0.0;      // model value at mu_chain
  double chain_residual = 0.0;
};

/// Errors: target-unreachable when the detector chain cannot reach target.
MuCalibration calibrate_mu(const ExperimentConfig& cfg, double target_g2);

/// Fraction of true coincidences inside a window of width w for two
/// detectors with Gaussian jitter.
double window_capture(double window, double sigma_a, double sigma_b);

/// Click-model g2 of the detector chain at the bypass arm, window losses
/// included.
double chain_bypass_g2(const ExperimentConfig& cfg, double mu);

}  // namespace afc::harness
