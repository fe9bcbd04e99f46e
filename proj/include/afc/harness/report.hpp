#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "afc/io/csv.hpp"

namespace afc::harness {

inline constexpr std::string_view kVersion = "0.1.0";

std::string sha256_hex(std::string_view data);

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Outcome of one scenario. Everything except the wall-clock fields written
/// next to it goes into the hashed payload.
struct RunReport {
  std::string scenario;
  std::string config_hash;
  std::uint64_t seed = 0;
  nlohmann::json metrics = nlohmann::json::object();
  nlohmann::json assumptions = nlohmann::json::array();
  std::map<std::string, io::Table> tables;
  std::map<std::string, io::Table> plots;
  std::vector<Assertion> assertions;

  void check(std::string name, bool ok, std::string detail = {});
  bool passed() const;

  nlohmann::json payload() const;
  std::string payload_hash() const;
};

/// Errors: hash-mismatch when the embedded config hash or payload hash do not
/// match a recomputation.
void verify_report(const nlohmann::json& written, const std::string& expected_config_hash);

/// <dir>/<scenario>/{report.json, <table>.csv, plot_<name>.csv}
void write_report(const RunReport& report, const std::filesystem::path& dir);

/// The document write_report stores as report.json.
nlohmann::json report_document(const RunReport& report);

}  // namespace afc::harness
