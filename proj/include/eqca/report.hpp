#pragma once

// Named analyses over JSON parameters, producing versioned JSON reports.
// This is the layer shared by the C API and the command-line tool.

#include <string>

#include <json.hpp>

#include "eqca/core.hpp"

namespace eqca {

inline constexpr const char* kToolkitVersion = "1.0.0";
inline constexpr const char* kReportSchema = "eqca.report/1";

/// {"alphabet_size": q, "radius": r, "table": [...]} or {"eca": n}.
RuleTable rule_from_json(const nlohmann::json& j);
nlohmann::json rule_to_json(const RuleTable& rule);

std::string hex64(std::uint64_t v);

struct AnalysisResult {
    nlohmann::json report;
    std::string text;      // human-readable summary
    std::string artifact;  // rendered space-time diagram (simulate only)
    bool passed = true;    // false on analysis-level failure (e.g. a mismatch)
};

/// Runs `command` ("simulate", "blocking.certify", "spectrum.scan", ...)
/// with parameters from `params`. The "threads" parameter caps parallelism
/// and never appears in the report; unknown parameters are rejected.
AnalysisResult analyze(const RuleTable& rule, const std::string& command, const nlohmann::json& params);

/// Commands accepted by analyze, in display order.
const std::vector<std::string>& analysis_commands();

}  // namespace eqca
