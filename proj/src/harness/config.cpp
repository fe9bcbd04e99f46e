#include "afc/harness/config.hpp"

#include <cmath>
#include <set>

#include "afc/error.hpp"
#include "afc/harness/report.hpp"

namespace afc::harness {

using nlohmann::json;

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::echo_trace: return "echo_trace";
    case Scenario::pol_sweep: return "pol_sweep";
    case Scenario::visibility_scan: return "visibility_scan";
    case Scenario::tomography: return "tomography";
    case Scenario::g2_run: return "g2_run";
    case Scenario::calibrate: return "calibrate";
  }
  return "unknown";
}

Scenario scenario_from_string(std::string_view n) {
  if (n == "echo" || n == "echo_trace") return Scenario::echo_trace;
  if (n == "polsweep" || n == "pol_sweep") return Scenario::pol_sweep;
  if (n == "visibility" || n == "visibility_scan") return Scenario::visibility_scan;
  if (n == "tomo" || n == "tomography") return Scenario::tomography;
  if (n == "g2" || n == "g2_run") return Scenario::g2_run;
  if (n == "calibrate") return Scenario::calibrate;
  throw Error(Errc::config, "unknown scenario '" + std::string(n) + "'");
}

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> v{Scenario::calibrate,       Scenario::echo_trace, Scenario::pol_sweep,
                                       Scenario::visibility_scan, Scenario::tomography, Scenario::g2_run};
  return v;
}

double ExperimentConfig::effective_pass_fraction() const {
  return pass_fraction ? *pass_fraction : source::spectral_pass_fraction(source.signal_bandwidth, comb.bandwidth);
}

void ExperimentConfig::validate() const {
  try {
    grid.validate();
    (void)spectral::build_comb(comb, grid);
    source.validate();
    herald_detector.validate();
    signal_detector.validate();
    duty.validate();
  } catch (const Error& e) {
    throw Error(Errc::config, e.what());
  }
  auto ratio = [](double x, const char* what) {
    if (!(x >= 0.0 && x < 1.0)) throw Error(Errc::config, std::string(what) + " must lie in [0, 1)");
  };
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error(Errc::config, std::string(what) + " must be > 0");
  };
  const double pf = effective_pass_fraction();
  if (!(pf >= 0.0 && pf <= 1.0)) throw Error(Errc::config, "pass_fraction must lie in [0, 1]");
  positive(coincidence_window, "coincidence_window");
  positive(tdc_bin, "tdc_bin");
  positive(echo.pulse_fwhm, "echo.pulse_fwhm");
  positive(echo.coherence_time, "echo.coherence_time");
  if (echo.pulses < 1) throw Error(Errc::config, "echo.pulses must be >= 1");
  ratio(polsweep.contrast, "polsweep.contrast");
  ratio(polsweep.drift, "polsweep.drift");
  positive(polsweep.stored_counts, "polsweep.stored_counts");
  positive(polsweep.reference_counts, "polsweep.reference_counts");
  if (polsweep.n_settings < 2) throw Error(Errc::config, "polsweep.n_settings must be >= 2");
  if (polsweep.scrambler != "on" && polsweep.scrambler != "off" && polsweep.scrambler != "both") {
    throw Error(Errc::config, "polsweep.scrambler must be on, off or both");
  }
  ratio(optics.extinction_hv, "optics.extinction_hv");
  ratio(optics.extinction_da, "optics.extinction_da");
  ratio(optics.extinction_rl, "optics.extinction_rl");
  if (optics.extinction_hv >= 0.5 || optics.extinction_da >= 0.5 || optics.extinction_rl >= 0.5) {
    throw Error(Errc::config, "PBS extinction must be < 0.5");
  }
  ratio(optics.detector_pol_depth, "optics.detector_pol_depth");
  if (visibility.scan != "theta" && visibility.scan != "phi" && visibility.scan != "both") {
    throw Error(Errc::config, "visibility.scan must be theta, phi or both");
  }
  if (visibility.n_settings < 4) throw Error(Errc::config, "visibility.n_settings must be >= 4");
  positive(visibility.acquisition_time, "visibility.acquisition_time");
  positive(visibility.herald_rate, "visibility.herald_rate");
  positive(visibility.signal_chain_efficiency, "visibility.signal_chain_efficiency");
  positive(tomography.acquisition_time, "tomography.acquisition_time");
  if (tomography.bootstrap < 2) throw Error(Errc::config, "tomography.bootstrap must be >= 2");
  if (g2.pulses < 1000) throw Error(Errc::config, "g2.pulses must be >= 1000");
  if (g2.trials < 1) throw Error(Errc::config, "g2.trials must be >= 1");
  if (!(calibration.target_efficiency >= 0.0 && calibration.target_efficiency < 1.0)) {
    throw Error(Errc::config, "calibration.target_efficiency must lie in [0, 1)");
  }
  if (!(calibration.target_g2 > 1.0)) throw Error(Errc::config, "calibration.target_g2 must be > 1");
  if (threads < 1) throw Error(Errc::config, "threads must be >= 1");
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig c;
  c.preset = std::string(name);
  c.comb.d0 = kPaperBackgroundDepth;
  if (name == "paper") {
    c.optics.extinction_hv = 0.012488;
    c.optics.extinction_da = 0.011583;
    c.optics.extinction_rl = 0.011583;
    return c;
  }
  if (name == "ideal") {
    c.optics = OpticsSettings{};
    c.optics.hwp_retardance_error = 0.0;
    c.optics.qwp_retardance_error = 0.0;
    c.optics.detector_pol_depth = 0.0;
    c.herald_detector.dark_rate = 0.0;
    c.signal_detector.dark_rate = 0.0;
    c.polsweep.contrast = 0.0;
    c.polsweep.drift = 0.0;
    c.polsweep.infinite_statistics = true;
    c.visibility.infinite_statistics = true;
    c.tomography.infinite_statistics = true;
    return c;
  }
  throw Error(Errc::config, "unknown preset '" + std::string(name) + "'");
}

namespace {

/// Reads the keys of one JSON object and complains about anything left over.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw Error(Errc::config, path_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw Error(Errc::config, path_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) throw Error(Errc::config, "unknown key '" + (path_.empty() ? k : path_ + "." + k) + "'");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_detector(const json& j, const std::string& path, source::DetectorParams& d) {
  Reader r(j, path);
  r.get("efficiency", d.efficiency);
  r.get("jitter_sigma", d.jitter_sigma);
  if (const json* f = r.child("jitter_fwhm")) {
    try {
      d.jitter_sigma = source::fwhm_to_sigma(f->get<double>());
    } catch (const json::exception& e) {
      throw Error(Errc::config, path + ".jitter_fwhm: " + e.what());
    }
  }
  r.get("dark_rate", d.dark_rate);
  r.get("dead_time", d.dead_time);
  r.finish();
}

json detector_json(const source::DetectorParams& d) {
  return {{"efficiency", d.efficiency}, {"jitter_sigma", d.jitter_sigma}, {"dark_rate", d.dark_rate},
          {"dead_time", d.dead_time}};
}

}  // namespace

ExperimentConfig apply_json(ExperimentConfig c, const json& doc) {
  if (doc.is_null()) return c;
  Reader r(doc, "");
  r.get("scenario", c.scenario);
  r.get("preset", c.preset);
  r.get("seed", c.seed);
  r.get("threads", c.threads);
  if (const json* j = r.child("grid")) {
    Reader g(*j, "grid");
    g.get("center_frequency", c.grid.center_frequency);
    g.get("span", c.grid.span);
    g.get("n_points", c.grid.n_points);
    g.finish();
  }
  if (const json* j = r.child("comb")) {
    Reader g(*j, "comb");
    g.get("delta", c.comb.delta);
    g.get("finesse", c.comb.finesse);
    g.get("d_peak", c.comb.d_peak);
    g.get("d0", c.comb.d0);
    g.get("bandwidth", c.comb.bandwidth);
    std::string shape(spectral::to_string(c.comb.shape));
    g.get("shape", shape);
    try {
      c.comb.shape = spectral::tooth_shape_from_string(shape);
    } catch (const Error& e) {
      throw Error(Errc::config, e.what());
    }
    g.finish();
  }
  if (const json* j = r.child("echo")) {
    Reader g(*j, "echo");
    g.get("pulse_fwhm", c.echo.pulse_fwhm);
    g.get("coherence_time", c.echo.coherence_time);
    g.get("dispersion", c.echo.dispersion);
    g.get("pulses", c.echo.pulses);
    g.get("dicke_atoms", c.echo.dicke_atoms);
    g.finish();
  }
  if (const json* j = r.child("source")) {
    Reader g(*j, "source");
    g.get("mu", c.source.mu);
    g.get("rep_rate", c.source.rep_rate);
    g.get("signal_bandwidth", c.source.signal_bandwidth);
    g.get("idler_efficiency", c.source.idler_efficiency);
    g.get("modes", c.source.modes);
    g.finish();
  }
  if (const json* j = r.child("herald_detector")) read_detector(*j, "herald_detector", c.herald_detector);
  if (const json* j = r.child("signal_detector")) read_detector(*j, "signal_detector", c.signal_detector);
  r.get("coincidence_window", c.coincidence_window);
  r.get("tdc_bin", c.tdc_bin);
  if (const json* j = r.child("duty")) {
    Reader g(*j, "duty");
    g.get("pump", c.duty.pump);
    g.get("wait", c.duty.wait);
    g.get("storage", c.duty.storage);
    g.finish();
  }
  if (const json* j = r.child("pass_fraction")) {
    if (j->is_null()) {
      c.pass_fraction.reset();
    } else if (j->is_number()) {
      c.pass_fraction = j->get<double>();
    } else {
      throw Error(Errc::config, "pass_fraction must be a number or null");
    }
  }
  r.get("scrambler", c.scrambler);
  if (const json* j = r.child("polsweep")) {
    Reader g(*j, "polsweep");
    g.get("n_settings", c.polsweep.n_settings);
    g.get("step_deg", c.polsweep.step_deg);
    g.get("scrambler", c.polsweep.scrambler);
    g.get("contrast", c.polsweep.contrast);
    g.get("drift", c.polsweep.drift);
    g.get("pump_angle_deg", c.polsweep.pump_angle_deg);
    g.get("stored_counts", c.polsweep.stored_counts);
    g.get("reference_counts", c.polsweep.reference_counts);
    g.get("infinite_statistics", c.polsweep.infinite_statistics);
    g.finish();
  }
  if (const json* j = r.child("optics")) {
    Reader g(*j, "optics");
    g.get("hwp_retardance_error", c.optics.hwp_retardance_error);
    g.get("qwp_retardance_error", c.optics.qwp_retardance_error);
    g.get("extinction_hv", c.optics.extinction_hv);
    g.get("extinction_da", c.optics.extinction_da);
    g.get("extinction_rl", c.optics.extinction_rl);
    g.get("detector_pol_depth", c.optics.detector_pol_depth);
    g.get("detector_axis_deg", c.optics.detector_axis_deg);
    g.finish();
  }
  if (const json* j = r.child("visibility")) {
    Reader g(*j, "visibility");
    g.get("scan", c.visibility.scan);
    g.get("n_settings", c.visibility.n_settings);
    g.get("acquisition_time", c.visibility.acquisition_time);
    g.get("herald_rate", c.visibility.herald_rate);
    g.get("signal_chain_efficiency", c.visibility.signal_chain_efficiency);
    g.get("infinite_statistics", c.visibility.infinite_statistics);
    g.finish();
  }
  if (const json* j = r.child("tomography")) {
    Reader g(*j, "tomography");
    g.get("acquisition_time", c.tomography.acquisition_time);
    g.get("bootstrap", c.tomography.bootstrap);
    g.get("depolarize", c.tomography.depolarize);
    g.get("correct_crosstalk", c.tomography.correct_crosstalk);
    g.get("infinite_statistics", c.tomography.infinite_statistics);
    g.finish();
  }
  if (const json* j = r.child("g2")) {
    Reader g(*j, "g2");
    g.get("pulses", c.g2.pulses);
    g.get("side_peaks", c.g2.side_peaks);
    g.get("chain_arm", c.g2.chain_arm);
    g.get("trials", c.g2.trials);
    g.finish();
  }
  if (const json* j = r.child("calibration")) {
    Reader g(*j, "calibration");
    g.get("target_efficiency", c.calibration.target_efficiency);
    g.get("target_g2", c.calibration.target_g2);
    g.finish();
  }
  r.finish();
  return c;
}

ExperimentConfig load_config(const json& doc, std::optional<std::string> preset) {
  std::string name = "paper";
  if (preset) {
    name = *preset;
  } else if (doc.is_object() && doc.contains("preset")) {
    try {
      name = doc.at("preset").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(Errc::config, std::string("preset: ") + e.what());
    }
  }
  ExperimentConfig c = apply_json(preset_config(name), doc);
  c.preset = name;
  c.validate();
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = c.scenario;
  j["preset"] = c.preset;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["grid"] = {{"center_frequency", c.grid.center_frequency}, {"span", c.grid.span}, {"n_points", c.grid.n_points}};
  j["comb"] = {{"delta", c.comb.delta},     {"finesse", c.comb.finesse},     {"d_peak", c.comb.d_peak},
               {"d0", c.comb.d0},           {"bandwidth", c.comb.bandwidth},
               {"shape", std::string(spectral::to_string(c.comb.shape))}};
  j["echo"] = {{"pulse_fwhm", c.echo.pulse_fwhm}, {"coherence_time", c.echo.coherence_time},
               {"dispersion", c.echo.dispersion}, {"pulses", c.echo.pulses},
               {"dicke_atoms", c.echo.dicke_atoms}};
  j["source"] = {{"mu", c.source.mu},
                 {"rep_rate", c.source.rep_rate},
                 {"signal_bandwidth", c.source.signal_bandwidth},
                 {"idler_efficiency", c.source.idler_efficiency},
                 {"modes", c.source.modes}};
  j["herald_detector"] = detector_json(c.herald_detector);
  j["signal_detector"] = detector_json(c.signal_detector);
  j["coincidence_window"] = c.coincidence_window;
  j["tdc_bin"] = c.tdc_bin;
  j["duty"] = {{"pump", c.duty.pump}, {"wait", c.duty.wait}, {"storage", c.duty.storage}};
  j["pass_fraction"] = c.pass_fraction ? json(*c.pass_fraction) : json(nullptr);
  j["scrambler"] = c.scrambler;
  j["polsweep"] = {{"n_settings", c.polsweep.n_settings},
                   {"step_deg", c.polsweep.step_deg},
                   {"scrambler", c.polsweep.scrambler},
                   {"contrast", c.polsweep.contrast},
                   {"drift", c.polsweep.drift},
                   {"pump_angle_deg", c.polsweep.pump_angle_deg},
                   {"stored_counts", c.polsweep.stored_counts},
                   {"reference_counts", c.polsweep.reference_counts},
                   {"infinite_statistics", c.polsweep.infinite_statistics}};
  j["optics"] = {{"hwp_retardance_error", c.optics.hwp_retardance_error},
                 {"qwp_retardance_error", c.optics.qwp_retardance_error},
                 {"extinction_hv", c.optics.extinction_hv},
                 {"extinction_da", c.optics.extinction_da},
                 {"extinction_rl", c.optics.extinction_rl},
                 {"detector_pol_depth", c.optics.detector_pol_depth},
                 {"detector_axis_deg", c.optics.detector_axis_deg}};
  j["visibility"] = {{"scan", c.visibility.scan},
                     {"n_settings", c.visibility.n_settings},
                     {"acquisition_time", c.visibility.acquisition_time},
                     {"herald_rate", c.visibility.herald_rate},
                     {"signal_chain_efficiency", c.visibility.signal_chain_efficiency},
                     {"infinite_statistics", c.visibility.infinite_statistics}};
  j["tomography"] = {{"acquisition_time", c.tomography.acquisition_time},
                     {"bootstrap", c.tomography.bootstrap},
                     {"depolarize", c.tomography.depolarize},
                     {"correct_crosstalk", c.tomography.correct_crosstalk},
                     {"infinite_statistics", c.tomography.infinite_statistics}};
  j["g2"] = {{"pulses", c.g2.pulses},
             {"side_peaks", c.g2.side_peaks},
             {"chain_arm", c.g2.chain_arm},
             {"trials", c.g2.trials}};
  j["calibration"] = {{"target_efficiency", c.calibration.target_efficiency},
                      {"target_g2", c.calibration.target_g2}};
  return j;
}

std::string config_hash(const ExperimentConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  // FNV-1a of the label selects the stream
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : label) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(seed, h);
}

}  // namespace afc::harness
