#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "afc/source/detector.hpp"
#include "afc/source/pair_source.hpp"
#include "afc/spectral/comb.hpp"
#include "afc/spectral/grid.hpp"

namespace afc::harness {

enum class Scenario { echo_trace, pol_sweep, visibility_scan, tomography, g2_run, calibrate };

std::string_view to_string(Scenario s);
/// Accepts both the long ids (echo_trace, ...) and CLI names (echo, polsweep,
/// visibility, tomo, g2, calibrate). Errors: config.
Scenario scenario_from_string(std::string_view name);
const std::vector<Scenario>& all_scenarios();

/// Optical depth of the background that brings the default comb to 1 %
/// recall with a 10 GHz photon; produced by `calibrate` and frozen here.
inline constexpr double kPaperBackgroundDepth = 1.766453;

struct EchoSettings {
  double pulse_fwhm = 10e9;         // spectral intensity FWHM of the photon
  double coherence_time = 100e-9;   // amplitude decay of the re-emission
  bool dispersion = true;
  std::uint64_t pulses = 4'000'000;
  std::size_t dicke_atoms = 20'000;  // 0 skips the oracle cross-check
};

struct PolSweepSettings {
  std::size_t n_settings = 12;
  double step_deg = 15.0;
  std::string scrambler = "both";  // off | on | both
  double contrast = 0.25;
  double drift = 0.07;
  double pump_angle_deg = 0.0;
  double stored_counts = 2e6;      // per setting at peak efficiency
  double reference_counts = 2e7;   // unprepared-fiber transmission run
  bool infinite_statistics = false;
};

/// Preparation (HWP, QWP) and analyzer (PC, PBS, two SNSPDs).
struct OpticsSettings {
  double hwp_retardance_error = 0.03;  // rad
  double qwp_retardance_error = 0.03;  // rad
  double extinction_hv = 0.0;          // PBS leak probability per basis
  double extinction_da = 0.0;
  double extinction_rl = 0.0;
  double detector_pol_depth = 0.05;
  double detector_axis_deg = 30.0;  // sweep and minus-port SNSPD; plus port aligned
};

struct VisibilitySettings {
  std::string scan = "both";  // theta | phi | both
  std::size_t n_settings = 12;
  double acquisition_time = 300.0;  // s per setting
  double herald_rate = 2.0e5;       // detected heralds per second
  double signal_chain_efficiency = 1.34e-3;  // source to analyzer output, detector included
  bool infinite_statistics = false;
};

struct TomographySettings {
  double acquisition_time = 1200.0;  // s per basis
  std::size_t bootstrap = 200;
  bool depolarize = false;
  bool correct_crosstalk = true;
  bool infinite_statistics = false;
};

struct G2Settings {
  std::uint64_t pulses = 3'000'000;
  std::size_t side_peaks = 4;
  bool chain_arm = true;
  std::size_t trials = 1;
};

struct CalibrationSettings {
  double target_efficiency = 0.01;
  double target_g2 = 14.1;
};

struct ExperimentConfig {
  std::string scenario = "all";
  std::string preset = "paper";
  std::uint64_t seed = 42;
  unsigned threads = 1;

  spectral::FrequencyGrid grid;
  spectral::CombParams comb;
  EchoSettings echo;

  source::PairSourceParams source;
  source::DetectorParams herald_detector = source::DetectorParams::si_apd();
  source::DetectorParams signal_detector = source::DetectorParams::snspd();
  double coincidence_window = 1e-9;
  double tdc_bin = 80e-12;
  source::DutyCycle duty;
  std::optional<double> pass_fraction;  // default: memory / source bandwidth
  bool scrambler = true;                // memory pumping in the qubit scenarios

  PolSweepSettings polsweep;
  OpticsSettings optics;
  VisibilitySettings visibility;
  TomographySettings tomography;
  G2Settings g2;
  CalibrationSettings calibration;

  double effective_pass_fraction() const;
  /// Validates every block with its owning module. Errors: config (wrapping
  /// the module error).
  void validate() const;
};

/// Defaults of a named preset: "paper" (imperfections of the experiment) or
/// "ideal" (lossless optics, no darks, expectation-valued statistics).
/// Errors: config.
ExperimentConfig preset_config(std::string_view name);

/// Overlay of a JSON document onto base. Unknown keys are rejected.
ExperimentConfig apply_json(ExperimentConfig base, const nlohmann::json& doc);

/// Resolve: preset (explicit name, else doc["preset"], else "paper") then doc.
ExperimentConfig load_config(const nlohmann::json& doc, std::optional<std::string> preset = std::nullopt);

nlohmann::json to_json(const ExperimentConfig& cfg);

/// SHA-256 of the canonical JSON dump of cfg.
std::string config_hash(const ExperimentConfig& cfg);

/// splitmix64 finaliser of (seed, stream)
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace afc::harness
