#pragma once

#include <string>
#include <vector>

#include "tspt/montecarlo.hpp"
#include "tspt/testing.hpp"

namespace tspt {

/// Machine-readable run reports. Every report is a single JSON document with
/// schema_version, the echoed invocation, the outcome payload, and a
/// timing_seconds field. Identical invocations on identical inputs produce
/// byte-identical documents apart from timing_seconds.
std::string render_test_report(const std::vector<std::string>& invocation,
                               const TestOutcome& outcome, double timing_seconds);

std::string render_study_report(const std::vector<std::string>& invocation,
                                const McReport& report, double timing_seconds);

/// Parse-and-redump; a report must survive this unchanged.
std::string reserialize_report(const std::string& report_json);

/// The report with timing_seconds removed, for stable comparisons.
std::string strip_timing(const std::string& report_json);

/// One-line human summary of a test outcome.
std::string summary_line(const TestOutcome& outcome);

}  // namespace tspt
