#include "tspt/report.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace tspt {

namespace {

using nlohmann::json;

constexpr const char* kSchemaVersion = "1.0";

json outcome_to_json(const TestOutcome& outcome) {
  json j;
  j["method"] = to_string(outcome.method);
  j["statistic"] = outcome.statistic;
  j["p_value"] = outcome.p_value;
  j["reject"] = outcome.reject;
  j["alpha"] = outcome.alpha;
  j["n"] = outcome.n;
  j["p"] = outcome.p;
  if (outcome.bandwidth_used) {
    j["bandwidth_used"] = *outcome.bandwidth_used;
  } else {
    j["bandwidth_used"] = nullptr;
  }
  j["floored"] = outcome.floored;
  if (outcome.perm_samples) j["perm_samples"] = *outcome.perm_samples;
  return j;
}

std::string render(const std::vector<std::string>& invocation, json outcome,
                   double timing_seconds) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["invocation"] = invocation;
  j["outcome"] = std::move(outcome);
  j["timing_seconds"] = timing_seconds;
  return j.dump(2);
}

}  // namespace

std::string render_test_report(const std::vector<std::string>& invocation,
                               const TestOutcome& outcome, double timing_seconds) {
  return render(invocation, outcome_to_json(outcome), timing_seconds);
}

std::string render_study_report(const std::vector<std::string>& invocation,
                                const McReport& report, double timing_seconds) {
  return render(invocation, json::parse(mc_report_to_json(report)), timing_seconds);
}

std::string reserialize_report(const std::string& report_json) {
  return json::parse(report_json).dump(2);
}

std::string strip_timing(const std::string& report_json) {
  json j = json::parse(report_json);
  j.erase("timing_seconds");
  // per-cell wall time is not part of the stable payload either
  if (j.contains("outcome") && j["outcome"].contains("cells")) {
    for (json& cell : j["outcome"]["cells"]) cell.erase("elapsed_seconds");
  }
  return j.dump(2);
}

std::string summary_line(const TestOutcome& outcome) {
  std::ostringstream out;
  out.precision(6);
  out << to_string(outcome.method) << ": statistic=" << outcome.statistic
      << " p=" << outcome.p_value << " reject=" << (outcome.reject ? "yes" : "no")
      << " (alpha=" << outcome.alpha << ", n=" << outcome.n << ", p=" << outcome.p;
  if (outcome.bandwidth_used) out << ", bandwidth=" << *outcome.bandwidth_used;
  if (outcome.floored) out << ", floored";
  out << ")";
  return out.str();
}

}  // namespace tspt
