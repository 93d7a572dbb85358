#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ecp {

// Verdict values: pass | fail | violation_confirmed | inconclusive.
struct VerdictEntry {
  std::string name;
  std::string verdict;
  std::string detail;
};

struct ReportEnvelope {
  std::string schema_version = "1";
  std::string command;
  std::string config_json = "{}";   // canonical echo of the run configuration
  std::vector<VerdictEntry> verdicts;
  std::vector<std::pair<std::string, double>> timings;  // name, seconds
  std::vector<std::string> artifacts;                   // files written
  std::string payload_json = "{}";  // command-specific data, already serialized
};

bool verdict_ok(const std::string& verdict);       // pass or violation_confirmed
bool all_verdicts_ok(const ReportEnvelope& e);

struct ReportPaths {
  std::string envelope;  // timestamped, append-only
  std::string verdicts;  // stable name, deterministic bytes
};

// Writes the full envelope as <command>-<timestamp>[-N].json and the stable
// subset (everything except timings) as <command>-verdicts.json. Creates the
// output directory if needed.
ReportPaths write_report(const ReportEnvelope& e, const std::string& out_dir);

}  // namespace ecp
