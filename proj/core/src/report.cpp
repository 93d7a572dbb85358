#include "ecp/report.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "ecp/common.hpp"

namespace ecp {

namespace {

using nlohmann::json;

json envelope_to_json(const ReportEnvelope& e, bool with_timings) {
  json j;
  j["schema_version"] = e.schema_version;
  j["command"] = e.command;
  j["config"] = json::parse(e.config_json);
  json verdicts = json::array();
  for (const auto& v : e.verdicts) {
    json entry;
    entry["name"] = v.name;
    entry["verdict"] = v.verdict;
    if (!v.detail.empty()) entry["detail"] = v.detail;
    verdicts.push_back(entry);
  }
  j["verdicts"] = verdicts;
  j["artifacts"] = e.artifacts;
  j["data"] = json::parse(e.payload_json);
  if (with_timings) {
    json timings = json::array();
    for (const auto& [name, seconds] : e.timings) {
      json entry;
      entry["name"] = name;
      entry["seconds"] = seconds;
      timings.push_back(entry);
    }
    j["timings"] = timings;
  }
  return j;
}

std::string utc_stamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_report: cannot open " + path);
  os << content;
}

}  // namespace

bool verdict_ok(const std::string& verdict) {
  return verdict == "pass" || verdict == "violation_confirmed";
}

bool all_verdicts_ok(const ReportEnvelope& e) {
  if (e.verdicts.empty()) return false;
  for (const auto& v : e.verdicts)
    if (!verdict_ok(v.verdict)) return false;
  return true;
}

ReportPaths write_report(const ReportEnvelope& e, const std::string& out_dir) {
  if (e.command.empty()) throw DomainError("write_report: empty command name");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  ReportPaths paths;
  const std::string stamp = utc_stamp();
  std::string base = out_dir + "/" + e.command + "-" + stamp;
  std::string candidate = base + ".json";
  for (int n = 1; fs::exists(candidate); ++n)  // keep reports append-only
    candidate = base + "-" + std::to_string(n) + ".json";
  paths.envelope = candidate;
  write_file(paths.envelope, envelope_to_json(e, true).dump(2) + "\n");

  paths.verdicts = out_dir + "/" + e.command + "-verdicts.json";
  write_file(paths.verdicts, envelope_to_json(e, false).dump(2) + "\n");
  return paths;
}

}  // namespace ecp
