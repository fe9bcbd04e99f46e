#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "afc/analysis/g2.hpp"
#include "afc/analysis/tomography.hpp"
#include "afc/analysis/visibility.hpp"
#include "afc/harness/calibrate.hpp"
#include "afc/harness/config.hpp"
#include "afc/harness/report.hpp"
#include "afc/polarization/jones.hpp"

namespace afc::harness {

// ---- polarization sweep ----

struct SweepResult {
  std::vector<double> angles_deg;
  std::vector<double> stored;
  std::vector<double> reference;
  std::vector<double> weighted;  // stored / reference, scaled to the memory efficiency
  std::vector<double> weighted_err;
  double modulation = 0.0;  // (max - min) / max of weighted
  std::size_t argmax = 0;
};

SweepResult simulate_pol_sweep(const ExperimentConfig& cfg, bool scrambled, std::uint64_t seed);

// ---- qubit analyzer (visibility and tomography) ----

enum class Arm { bypass, storage };
enum class Scan { theta, phi };

/// Heralded coincidence rate into the analyzer (Hz) and accidental rate per
/// analyzer output (Hz), duty cycle included for the storage arm.
struct ArmRates {
  double coincidence_rate = 0.0;
  double accidental_rate = 0.0;
};
ArmRates arm_rates(const ExperimentConfig& cfg, Arm arm, double memory_efficiency);

/// Polarization actually produced by the preparation waveplates for target.
pol::JonesVector prepared_state(const ExperimentConfig& cfg, const pol::JonesVector& target);

/// Counts at the two analyzer outputs for one setting. plus_state selects the
/// projection pair. depolarized replaces the input by I/2.
analysis::BasisCounts measure_projection(const ExperimentConfig& cfg, const pol::JonesVector& state,
                                         const pol::JonesVector& plus_state, double extinction,
                                         double expected_total, double accidentals_per_output,
                                         bool infinite_statistics, bool depolarized, std::mt19937_64& rng);

/// Detection-efficiency multipliers of the two analyzer detectors.
std::pair<double, double> analyzer_multipliers(const ExperimentConfig& cfg);

struct VisibilityCurve {
  Arm arm = Arm::bypass;
  Scan scan = Scan::theta;
  std::vector<double> settings;  // fit variable x (rad)
  std::vector<double> n_plus, n_minus;
  std::vector<double> p_plus, p_minus, err_plus, err_minus;
  analysis::VisibilityFit fit_plus;
  analysis::VisibilityFit fit_minus;
  double fidelity = 0.0;
  double fidelity_err = 0.0;
};

VisibilityCurve simulate_visibility(const ExperimentConfig& cfg, Arm arm, Scan scan, double memory_efficiency,
                                    std::uint64_t seed);

struct TomographyTarget {
  std::string label;
  pol::JonesVector state;
};
const std::vector<TomographyTarget>& tomography_targets();

struct TomographyOutcome {
  std::string label;
  analysis::TomographyCounts raw;
  analysis::TomographyCounts corrected;
  analysis::DensityMatrix rho;      // MLE of the corrected counts
  analysis::DensityMatrix rho_raw;  // MLE of the raw counts
  bool linear_physical = true;
  double fidelity = 0.0;
  double fidelity_raw = 0.0;
  double bootstrap_mean = 0.0;
  double bootstrap_se = 0.0;
};

std::vector<TomographyOutcome> simulate_tomography(const ExperimentConfig& cfg, double memory_efficiency,
                                                   std::uint64_t seed);

/// Undo known accidentals, crosstalk and detector imbalance of one
/// projection pair. Background-subtracted counts are floored at zero.
analysis::BasisCounts correct_crosstalk(const analysis::BasisCounts& raw, double extinction, double m_plus,
                                        double m_minus, double accidentals_per_output = 0.0);

// ---- g2 ----

enum class Detection { ideal, chain };

struct G2Arm {
  source::CoincidenceSet counts;
  analysis::G2Estimate g2;
  analysis::G2Estimate g2_side;
  double mu = 0.0;
  double mu_effective = 0.0;
};

/// Pulse-level time-tag simulation of one arm. The storage arm passes the
/// pairs through the bandwidth filter and recalls the signal after 1/delta
/// with probability memory_efficiency (prompt transmission with
/// prompt_fraction). Seeds are shared between arms so runs are matched.
G2Arm simulate_g2_arm(const ExperimentConfig& cfg, Detection detection, Arm arm, double mu,
                      double memory_efficiency, double prompt_fraction, std::uint64_t seed);

// ---- scenarios ----

RunReport run_echo_trace(const ExperimentConfig& cfg);
RunReport run_pol_sweep(const ExperimentConfig& cfg);
RunReport run_visibility_scan(const ExperimentConfig& cfg);
RunReport run_tomography(const ExperimentConfig& cfg);
RunReport run_g2(const ExperimentConfig& cfg);
RunReport run_calibrate(const ExperimentConfig& cfg);
RunReport run_scenario(Scenario s, const ExperimentConfig& cfg);

struct SuiteResult {
  std::vector<RunReport> reports;
  nlohmann::json summary;
  std::string summary_hash;
  bool passed = false;
};
SuiteResult run_all(const ExperimentConfig& cfg);

/// Seed handed to a scenario inside `all` and by the single-scenario entry
/// points, so both produce identical reports.
std::uint64_t scenario_seed(const ExperimentConfig& cfg, Scenario s);

}  // namespace afc::harness
