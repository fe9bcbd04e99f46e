#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "afc/error.hpp"
#include "afc/harness/scenarios.hpp"
#include "afc/io/csv.hpp"

using namespace afc::harness;
using nlohmann::json;
using afc::Errc;

namespace {

ExperimentConfig paper() { return load_config(json::object()); }

ExperimentConfig with(const json& doc, const char* preset = "paper") { return load_config(doc, std::string(preset)); }

double metric(const RunReport& r, const std::string& k) { return r.metrics.at(k).get<double>(); }

bool has_failed(const RunReport& r) {
  for (const auto& a : r.assertions) {
    if (!a.passed) {
      MESSAGE("failed: " << a.name << " " << a.detail);
      return true;
    }
  }
  return false;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const afc::Error& e) {
    return e.code();
  }
  FAIL("no afc::Error thrown");
  return Errc::io;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("afc_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config defaults, overlays and rejection of unknown keys") {
  const auto c = paper();
  CHECK(c.seed == 42);
  CHECK(c.comb.delta == 200e6);
  CHECK(c.comb.d0 == kPaperBackgroundDepth);
  CHECK(c.effective_pass_fraction() == doctest::Approx(0.8));
  const auto o = with({{"comb", {{"delta", 100e6}}}, {"seed", 7}, {"pass_fraction", 0.5}});
  CHECK(o.comb.delta == 100e6);
  CHECK(o.seed == 7);
  CHECK(o.effective_pass_fraction() == 0.5);
  CHECK(code_of([] { load_config({{"comb", {{"spacing", 1}}}}); }) == Errc::config);
  CHECK(code_of([] { load_config({{"bogus", 1}}); }) == Errc::config);
  CHECK(code_of([] { load_config({{"comb", {{"delta", -1.0}}}}); }) == Errc::config);
  CHECK(code_of([] { load_config({{"comb", {{"delta", "fast"}}}}); }) == Errc::config);
  CHECK(code_of([] { load_config(json::object(), std::string("lab")); }) == Errc::config);
  CHECK(code_of([] { load_config({{"signal_detector", {{"efficiency", 1.5}}}}); }) == Errc::config);
  const auto fw = with({{"herald_detector", {{"jitter_fwhm", 600e-12}}}});
  CHECK(fw.herald_detector.jitter_sigma == doctest::Approx(afc::source::fwhm_to_sigma(600e-12)));
}

TEST_CASE("config serialization round-trips and hashes stably") {
  const auto c = with({{"comb", {{"finesse", 3.0}}}, {"tomography", {{"depolarize", true}}}});
  const auto back = load_config(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c) != config_hash(paper()));
  CHECK(config_hash(c).size() == 64);
}

TEST_CASE("seed derivation is deterministic and separates streams") {
  CHECK(derive_seed(42, "echo") == derive_seed(42, "echo"));
  CHECK(derive_seed(42, "echo") != derive_seed(42, "g2"));
  CHECK(derive_seed(42, 0) != derive_seed(43, 0));
  CHECK(derive_seed(42, 0) != derive_seed(42, 1));
  CHECK(scenario_from_string("tomo") == Scenario::tomography);
  CHECK(scenario_from_string("g2_run") == Scenario::g2_run);
  CHECK(code_of([] { scenario_from_string("nope"); }) == Errc::config);
  CHECK(all_scenarios().size() == 6);
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("calibration: 1 percent, zero target, unreachable target, g2 target") {
  const auto c = paper();
  const auto cc = calibrate_comb(c, 0.01);
  CHECK(std::abs(cc.residual) < 1e-3);
  CHECK(std::abs(cc.d0 - kPaperBackgroundDepth) < 1e-4);
  const auto z = calibrate_comb(c, 0.0);
  CHECK(z.d_peak == 0.0);
  CHECK(z.efficiency < 1e-9);
  CHECK(code_of([&] { calibrate_comb(c, 0.9); }) == Errc::target_unreachable);
  const auto m = calibrate_mu(c, 14.1);
  CHECK(std::abs(m.mu_ideal - 0.0763) < 1e-4);
  CHECK(std::abs(m.chain_residual) < 1e-6);
  CHECK(m.mu_chain > 0.0);
}

TEST_CASE("echo trace at the default comb") {
  auto c = paper();
  c.echo.pulses = 1000000;
  const auto r = run_echo_trace(c);
  CHECK_FALSE(has_failed(r));
  CHECK(std::abs(metric(r, "histogram_echo_centroid_s") - 5e-9) <= 80e-12);
  CHECK(std::abs(metric(r, "trace_echo_delay_s") - 5e-9) <= 80e-12);
  CHECK(std::abs(metric(r, "efficiency") - 0.01) < 1e-3);
  CHECK(r.tables.count("histogram") == 1);
  CHECK(r.plots.count("echo_histogram") == 1);
}

TEST_CASE("echo trace without comb contrast shows only the transmitted peak") {
  auto c = with({{"comb", {{"d_peak", 0.0}}}, {"echo", {{"pulses", 1000000}}}});
  const auto r = run_echo_trace(c);
  CHECK_FALSE(has_failed(r));
  CHECK(metric(r, "efficiency") < 1e-6);
  CHECK(metric(r, "histogram_echo_counts") <= 1e-3 * metric(r, "histogram_prompt_counts"));
}

TEST_CASE("100 MHz comb recalls at 10 ns, confirmed by the atom oracle") {
  auto c = with({{"comb", {{"delta", 100e6}}}, {"echo", {{"pulses", 1000000}}}});
  const auto r = run_echo_trace(c);
  CHECK_FALSE(has_failed(r));
  CHECK(std::abs(metric(r, "trace_echo_delay_s") - 10e-9) <= 80e-12);
  CHECK(std::abs(metric(r, "oracle_echo_time_s") - 10e-9) <= c.grid.time_step());
}

TEST_CASE("polarization sweep: contrast, scrambling and a flat memory") {
  const auto r = run_pol_sweep(paper());
  CHECK_FALSE(has_failed(r));
  CHECK(std::abs(metric(r, "modulation_off") - 0.25) <= 0.03);
  CHECK(metric(r, "modulation_on") <= 0.07);
  CHECK(metric(r, "argmax_deg_off") == 0.0);

  const auto flat = simulate_pol_sweep(with({{"polsweep", {{"contrast", 0.0}}}}), false, 5);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < flat.weighted.size(); ++i) max_rel = std::max(max_rel, flat.weighted_err[i] / flat.weighted[i]);
  CHECK(flat.modulation <= 5.0 * max_rel);
  const auto exact = simulate_pol_sweep(with({{"polsweep", {{"infinite_statistics", true}}}}), false, 5);
  REQUIRE(exact.weighted.size() == 12);
  // detector polarization dependence cancels against the reference run
  CHECK(std::abs(exact.modulation - 0.25) < 0.01);
}

TEST_CASE("visibility: ideal pipeline and paper preset") {
  const auto ideal = run_visibility_scan(with(json::object(), "ideal"));
  CHECK_FALSE(has_failed(ideal));
  for (const char* k : {"bypass_hv", "bypass_pm", "storage_hv", "storage_pm"}) {
    CHECK(metric(ideal, std::string("visibility_plus_") + k) >= 0.999);
    CHECK(metric(ideal, std::string("fidelity_") + k) >= 0.9995);
  }
  const auto r = run_visibility_scan(paper());
  CHECK_FALSE(has_failed(r));
  CHECK(std::abs(metric(r, "fidelity_storage_hv") - 0.984) <= 3 * metric(r, "fidelity_err_storage_hv"));
  CHECK(std::abs(metric(r, "fidelity_storage_pm") - 0.9793) <= 3 * metric(r, "fidelity_err_storage_pm"));
}

TEST_CASE("rates respect the 700/1500 duty cycle") {
  const auto c = paper();
  const auto b = arm_rates(c, Arm::bypass, 0.01);
  const auto s = arm_rates(c, Arm::storage, 0.01);
  CHECK(s.coincidence_rate == doctest::Approx(b.coincidence_rate * 0.01 * 0.8 * 700.0 / 1500.0).epsilon(1e-12));
  CHECK(s.accidental_rate == doctest::Approx(b.accidental_rate * 700.0 / 1500.0).epsilon(1e-12));
  CHECK(std::abs(s.coincidence_rate - 1.0) < 0.05);
}

TEST_CASE("tomography: noiseless, paper preset and depolarized input") {
  auto noiseless = with({{"tomography", {{"infinite_statistics", true}}}}, "ideal");
  const auto n = run_tomography(noiseless);
  CHECK_FALSE(has_failed(n));
  for (const auto& t : tomography_targets()) CHECK(std::abs(metric(n, "fidelity_" + t.label) - 1.0) < 1e-6);

  const auto r = run_tomography(paper());
  CHECK_FALSE(has_failed(r));
  for (const auto& t : tomography_targets()) CHECK(metric(r, "fidelity_" + t.label) >= 0.985);

  const auto d = run_tomography(with({{"tomography", {{"depolarize", true}, {"infinite_statistics", true}}}}));
  CHECK_FALSE(has_failed(d));
  for (const auto& t : tomography_targets()) CHECK(std::abs(metric(d, "fidelity_" + t.label) - 0.5) < 1e-6);
}

TEST_CASE("crosstalk correction inverts the analyzer model") {
  const auto c = paper();
  const auto [mp, mm] = analyzer_multipliers(c);
  std::mt19937_64 rng(1);
  const auto state = afc::pol::prepare_qubit(0.3, 0.0);
  const auto raw = measure_projection(c, state, afc::pol::horizontal(), 0.02, 1e4, 3.0, true, false, rng);
  const auto fixed = correct_crosstalk(raw, 0.02, mp, mm, 3.0);
  CHECK(fixed.plus / fixed.total() == doctest::Approx(std::cos(0.3) * std::cos(0.3)).epsilon(1e-12));
}

TEST_CASE("g2: bypass reproduces 1 + 1/mu and storage exceeds it") {
  auto c = paper();
  c.g2.chain_arm = false;
  const auto r = run_g2(c);
  CHECK_FALSE(has_failed(r));
  CHECK(metric(r, "coincidences_bypass") >= 300);
  CHECK(metric(r, "g2_storage") > metric(r, "g2_bypass"));

  auto bright = with({{"source", {{"mu", 10.0}}}, {"g2", {{"pulses", 200000}, {"chain_arm", false}}}});
  const auto b = run_g2(bright);
  CHECK(std::abs(metric(b, "g2_bypass") - 1.1) <= 3 * metric(b, "g2_bypass_err"));
}

TEST_CASE("reports are deterministic and verifiable") {
  auto c = paper();
  c.g2.chain_arm = false;
  const auto a = run_g2(c);
  const auto b = run_g2(c);
  CHECK(a.payload_hash() == b.payload_hash());
  c.seed = 43;
  CHECK(run_g2(c).payload_hash() != a.payload_hash());

  const auto dir = scratch("report");
  write_report(a, dir);
  std::ifstream f(dir / "g2_run" / "report.json");
  const json doc = json::parse(f);
  CHECK_NOTHROW(verify_report(doc, a.config_hash));
  CHECK(code_of([&] { verify_report(doc, std::string(64, '0')); }) == Errc::hash_mismatch);
  json tampered = doc;
  tampered["payload"]["metrics"]["g2_bypass"] = 99.0;
  CHECK(code_of([&] { verify_report(tampered, a.config_hash); }) == Errc::hash_mismatch);
  CHECK(std::filesystem::exists(dir / "g2_run" / "g2.csv"));
  CHECK(std::filesystem::exists(dir / "g2_run" / "plot_g2.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("module errors carry the scenario name") {
  auto c = paper();
  c.calibration.target_efficiency = 0.9;
  try {
    run_calibrate(c);
    FAIL("expected target-unreachable");
  } catch (const afc::Error& e) {
    CHECK(e.code() == Errc::target_unreachable);
    CHECK(std::string(e.what()).find("calibrate") != std::string::npos);
  }
}

TEST_CASE("CSV round trips") {
  const auto dir = scratch("csv");
  std::filesystem::create_directories(dir);
  afc::analysis::TomographyCounts t{{10, 2}, {5.5, 6.5}, {0, 12}};
  afc::io::write_counts_table(dir / "counts.csv", t);
  const auto back = afc::io::read_counts_table(dir / "counts.csv");
  CHECK(back.hv.plus == 10);
  CHECK(back.da.minus == 6.5);
  CHECK(back.rl.plus == 0);
  afc::io::ComplexSeries s{"time_s", {0.0, 1.0, 2.0}, {{1, 2}, {3, -4}, {0.125, 1e-300}}};
  afc::io::write_complex_csv(dir / "z.csv", s);
  const auto zs = afc::io::read_complex_csv(dir / "z.csv");
  CHECK(zs.axis == s.axis);
  CHECK(zs.values == s.values);
  CHECK(code_of([&] { afc::io::read_counts_table(dir / "missing.csv"); }) == Errc::io);
  const auto p = afc::io::plot_table({1, 2}, {3, 4}, {0.1, 0.2});
  CHECK(p.header == std::vector<std::string>{"x", "y", "yerr"});
  std::filesystem::remove_all(dir);
}

}
