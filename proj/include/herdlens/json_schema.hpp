#ifndef HERDLENS_JSON_SCHEMA_HPP
#define HERDLENS_JSON_SCHEMA_HPP

#include "json.hpp"

#include <string>
#include <vector>

namespace herdlens {

/// Validates `doc` against the JSON Schema keywords the report schema uses:
/// $ref (local "#/..." pointers), type, const, enum, minimum, maximum,
/// required, properties, additionalProperties and items. Returns one message
/// per violation, each prefixed with its JSON pointer.
std::vector<std::string> validate_json_schema(const nlohmann::json& schema, const nlohmann::json& doc);

} // namespace herdlens

#endif
