#include "afc/harness/report.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <memory>

#include "afc/error.hpp"

namespace afc::harness {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error(Errc::io, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * len);
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

void RunReport::check(std::string name, bool ok, std::string detail) {
  assertions.push_back({std::move(name), ok, std::move(detail)});
}

bool RunReport::passed() const {
  for (const auto& a : assertions) {
    if (!a.passed) return false;
  }
  return true;
}

json RunReport::payload() const {
  json j;
  j["scenario"] = scenario;
  j["config_hash"] = config_hash;
  j["provenance"] = {{"seed", seed}, {"version", kVersion}};
  j["metrics"] = metrics;
  j["assumptions"] = assumptions;
  json a = json::array();
  for (const auto& x : assertions) a.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  j["assertions"] = a;
  json t = json::object();
  for (const auto& [k, v] : tables) t[k] = sha256_hex(v.to_string());
  j["table_sha256"] = t;
  json p = json::object();
  for (const auto& [k, v] : plots) p[k] = sha256_hex(v.to_string());
  j["plot_sha256"] = p;
  j["passed"] = passed();
  return j;
}

std::string RunReport::payload_hash() const { return sha256_hex(payload().dump()); }

json report_document(const RunReport& r) {
  json doc;
  doc["payload"] = r.payload();
  doc["payload_sha256"] = r.payload_hash();
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  doc["written_at_unix"] = std::chrono::duration_cast<std::chrono::seconds>(now).count();
  return doc;
}

void verify_report(const json& written, const std::string& expected_config_hash) {
  if (!written.contains("payload") || !written.contains("payload_sha256")) {
    throw Error(Errc::hash_mismatch, "report lacks payload or payload hash");
  }
  const json& p = written.at("payload");
  if (p.value("config_hash", std::string{}) != expected_config_hash) {
    throw Error(Errc::hash_mismatch, "config hash differs from the configuration supplied");
  }
  if (sha256_hex(p.dump()) != written.at("payload_sha256").get<std::string>()) {
    throw Error(Errc::hash_mismatch, "payload was modified after writing");
  }
}

void write_report(const RunReport& r, const std::filesystem::path& dir) {
  const auto sub = dir / r.scenario;
  std::filesystem::create_directories(sub);
  for (const auto& [k, v] : r.tables) io::write_table(sub / (k + ".csv"), v);
  for (const auto& [k, v] : r.plots) io::write_table(sub / ("plot_" + k + ".csv"), v);
  std::ofstream f(sub / "report.json", std::ios::binary);
  if (!f) throw Error(Errc::io, "cannot write report in " + sub.string());
  f << report_document(r).dump(2) << '\n';
}

}  // namespace afc::harness
