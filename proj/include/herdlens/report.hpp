#ifndef HERDLENS_REPORT_HPP
#define HERDLENS_REPORT_HPP

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace herdlens {

inline constexpr const char* kSchemaVersion = "1.0";

/// Absent analyses stay absent; nothing is null-filled.
struct AnalysisReport {
    nlohmann::json config = nlohmann::json::object();
    std::optional<nlohmann::json> gait;
    std::optional<nlohmann::json> speed;
    std::optional<nlohmann::json> graze;
    std::optional<nlohmann::json> rest;
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const AnalysisReport& report);

/// Throws SchemaError for a document that fails the published schema.
AnalysisReport report_from_json(const nlohmann::json& doc);

/// Keys sorted at every level, two-space indent, trailing newline.
std::string serialize_report(const AnalysisReport& report);

void write_report(const AnalysisReport& report, const std::filesystem::path& path);
AnalysisReport read_report(const std::filesystem::path& path);

const nlohmann::json& report_schema();
const std::string& report_schema_text();
std::vector<std::string> validate_report(const nlohmann::json& doc);

} // namespace herdlens

#endif
