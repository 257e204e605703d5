#include "herdlens/report.hpp"

#include "herdlens/error.hpp"
#include "herdlens/io.hpp"
#include "herdlens/json_schema.hpp"

namespace herdlens {

namespace {

const char kSchemaText[] =
#include "report_schema.inc"
    ;

} // namespace

const std::string& report_schema_text() {
    static const std::string text(kSchemaText);
    return text;
}

const nlohmann::json& report_schema() {
    static const nlohmann::json schema = nlohmann::json::parse(report_schema_text());
    return schema;
}

std::vector<std::string> validate_report(const nlohmann::json& doc) {
    return validate_json_schema(report_schema(), doc);
}

nlohmann::json to_json(const AnalysisReport& report) {
    nlohmann::json doc = nlohmann::json::object();
    doc["schema_version"] = kSchemaVersion;
    doc["config"] = report.config;
    doc["warnings"] = report.warnings;
    if (report.gait) doc["gait"] = *report.gait;
    if (report.speed) doc["speed"] = *report.speed;
    if (report.graze) doc["graze"] = *report.graze;
    if (report.rest) doc["rest"] = *report.rest;
    return doc;
}

AnalysisReport report_from_json(const nlohmann::json& doc) {
    const auto errors = validate_report(doc);
    if (!errors.empty()) {
        std::string message = "report does not match the schema: " + errors.front();
        if (errors.size() > 1) message += " (and " + std::to_string(errors.size() - 1) + " more)";
        fail(ErrorCode::Schema, message);
    }
    AnalysisReport report;
    report.config = doc.at("config");
    report.warnings = doc.at("warnings").get<std::vector<std::string>>();
    if (doc.contains("gait")) report.gait = doc["gait"];
    if (doc.contains("speed")) report.speed = doc["speed"];
    if (doc.contains("graze")) report.graze = doc["graze"];
    if (doc.contains("rest")) report.rest = doc["rest"];
    return report;
}

std::string serialize_report(const AnalysisReport& report) { return to_json(report).dump(2) + "\n"; }

void write_report(const AnalysisReport& report, const std::filesystem::path& path) {
    write_file_atomic(path, serialize_report(report));
}

AnalysisReport read_report(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        fail(ErrorCode::ParseError, path.string() + " is not valid JSON");
    }
    return report_from_json(doc);
}

} // namespace herdlens
