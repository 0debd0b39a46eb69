#pragma once

// Human-readable and JSON renderings of analysis results.

#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "bell/core.hpp"
#include "bell/engine.hpp"
#include "bell/stats.hpp"

namespace bell::report {

/// p-values below 1e-300 are shown as a power of ten from the log value.
std::string format_probability(double value, double ln_value);

nlohmann::json to_json(const stats::TestReport& r);
nlohmann::json to_json(const stats::PowerReport& r);
nlohmann::json to_json(const stats::NoSignalingReport& r);
nlohmann::json to_json(const AuditReport& r);
nlohmann::json enumeration_json();

std::string to_text(const stats::TestReport& r);
std::string to_text(const stats::PowerReport& r);
std::string to_text(const stats::NoSignalingReport& r);
std::string to_text(const AuditReport& r);
/// One row per deterministic strategy, tab separated, then the maximum.
std::string enumeration_text();

/// The audit section of an analysis: a report, or the reason it does not apply.
using AuditOutcome = std::variant<AuditReport, std::string>;
AuditOutcome try_audit(const ExperimentLog& log);

}  // namespace bell::report
