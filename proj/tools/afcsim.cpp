// afcsim: batch runner for the memory simulation scenarios.
//
//   afcsim echo --config cfg.json --seed 7 --out-dir out
//   afcsim all --preset paper --seed 42

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "afc/error.hpp"
#include "afc/harness/scenarios.hpp"

namespace {

using namespace afc::harness;
using nlohmann::json;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "afc_out";
  std::optional<std::string> preset;
  bool quiet = false;
};

ExperimentConfig resolve(const Options& o) {
  json doc = json::object();
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw afc::Error(afc::Errc::io, "cannot open config " + o.config_path);
    try {
      doc = json::parse(f);
    } catch (const json::parse_error& e) {
      throw afc::Error(afc::Errc::config, std::string("malformed JSON: ") + e.what());
    }
  }
  ExperimentConfig cfg = load_config(doc, o.preset);
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();
  return cfg;
}

void print(const RunReport& r, bool quiet, double seconds) {
  if (!quiet) {
    for (const auto& a : r.assertions) {
      std::printf("  [%s] %s%s%s\n", a.passed ? "ok" : "FAIL", a.name.c_str(), a.detail.empty() ? "" : ": ",
                  a.detail.c_str());
    }
  }
  std::printf("%-16s %s  payload %s  (%.1f s)\n", r.scenario.c_str(), r.passed() ? "PASS" : "FAIL",
              r.payload_hash().substr(0, 16).c_str(), seconds);
}

void write_summary(const std::filesystem::path& dir, const json& summary) {
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / "summary.json", std::ios::binary);
  if (!f) throw afc::Error(afc::Errc::io, "cannot write summary in " + dir.string());
  f << summary.dump(2) << '\n';
}

int run(const Options& o, std::optional<Scenario> which) {
  const ExperimentConfig cfg = resolve(o);
  const std::filesystem::path dir(o.out_dir);
  std::vector<Scenario> list = which ? std::vector<Scenario>{*which} : all_scenarios();

  bool ok = true;
  json scen = json::object();
  for (Scenario s : list) {
    const auto t0 = std::chrono::steady_clock::now();
    const RunReport r = run_scenario(s, cfg);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_report(r, dir);
    print(r, o.quiet, dt);
    ok = ok && r.passed();
    scen[r.scenario] = {{"payload_sha256", r.payload_hash()}, {"passed", r.passed()}};
  }
  json summary = {{"config_hash", config_hash(cfg)}, {"seed", cfg.seed}, {"version", kVersion},
                  {"scenarios", scen},           {"passed", ok}};
  summary["summary_sha256"] = sha256_hex(summary.dump());
  write_summary(dir, summary);
  std::printf("%s\n", ok ? "all assertions passed" : "assertions FAILED");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AFC quantum memory simulation harness"};
  app.require_subcommand(1);
  Options o;
  std::string preset;
  std::uint64_t seed = 0;

  const std::vector<std::pair<std::string, std::optional<Scenario>>> subs{
      {"echo", Scenario::echo_trace},   {"polsweep", Scenario::pol_sweep}, {"visibility", Scenario::visibility_scan},
      {"tomo", Scenario::tomography},   {"g2", Scenario::g2_run},          {"calibrate", Scenario::calibrate},
      {"all", std::nullopt},
  };
  for (const auto& [name, s] : subs) {
    auto* sub = app.add_subcommand(name, name == "all" ? "run every scenario" : "run the " + name + " scenario");
    sub->add_option("-c,--config", o.config_path, "JSON configuration document")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master RNG seed (overrides the config)");
    sub->add_option("-o,--out-dir", o.out_dir, "output directory");
    sub->add_option("--preset", preset, "defaults to start from")->check(CLI::IsMember({"paper", "ideal"}));
    sub->add_flag("-q,--quiet", o.quiet, "print only per-scenario status");
  }
  CLI11_PARSE(app, argc, argv);

  for (const auto& [name, s] : subs) {
    CLI::App* sub = app.get_subcommand(name);
    if (!sub->parsed()) continue;
    if (sub->count("--seed")) o.seed = seed;
    if (sub->count("--preset")) o.preset = preset;
    try {
      return run(o, s);
    } catch (const afc::Error& e) {
      std::fprintf(stderr, "afcsim: %s\n", e.what());
      return 2;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "afcsim: %s\n", e.what());
      return 2;
    }
  }
  return 2;
}
