#include "herdlens/json_schema.hpp"

namespace herdlens {

namespace {

using nlohmann::json;

bool has_type(const json& value, const std::string& type) {
    if (type == "object") return value.is_object();
    if (type == "array") return value.is_array();
    if (type == "string") return value.is_string();
    if (type == "boolean") return value.is_boolean();
    if (type == "null") return value.is_null();
    if (type == "integer") return value.is_number_integer();
    if (type == "number") return value.is_number();
    return false;
}

class Validator {
public:
    explicit Validator(const json& root) : root_(root) {}

    void check(const json& schema, const json& value, const std::string& where) {
        if (schema.is_boolean()) {
            if (!schema.get<bool>()) report(where, "no value is allowed here");
            return;
        }
        if (schema.contains("$ref")) {
            const auto ref = schema["$ref"].get<std::string>();
            if (ref.rfind("#", 0) != 0) {
                report(where, "unsupported reference " + ref);
                return;
            }
            check(root_.at(json::json_pointer(ref.substr(1))), value, where);
        }
        if (schema.contains("type")) {
            const auto& t = schema["type"];
            bool ok = false;
            if (t.is_string()) {
                ok = has_type(value, t.get<std::string>());
            } else {
                for (const auto& option : t) ok = ok || has_type(value, option.get<std::string>());
            }
            if (!ok) {
                report(where, "expected type " + t.dump() + ", found " + value.type_name());
                return;
            }
        }
        if (schema.contains("const") && value != schema["const"]) {
            report(where, "expected " + schema["const"].dump());
        }
        if (schema.contains("enum")) {
            bool found = false;
            for (const auto& option : schema["enum"]) found = found || value == option;
            if (!found) report(where, value.dump() + " is not one of " + schema["enum"].dump());
        }
        if (value.is_number()) {
            if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>()) {
                report(where, value.dump() + " is below the minimum " + schema["minimum"].dump());
            }
            if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>()) {
                report(where, value.dump() + " is above the maximum " + schema["maximum"].dump());
            }
        }
        if (value.is_object()) {
            if (schema.contains("required")) {
                for (const auto& key : schema["required"]) {
                    if (!value.contains(key.get<std::string>())) {
                        report(where, "missing required property '" + key.get<std::string>() + "'");
                    }
                }
            }
            for (const auto& [key, child] : value.items()) {
                const std::string path = where + "/" + key;
                if (schema.contains("properties") && schema["properties"].contains(key)) {
                    check(schema["properties"][key], child, path);
                } else if (schema.contains("additionalProperties")) {
                    const auto& extra = schema["additionalProperties"];
                    if (extra.is_boolean() && !extra.get<bool>()) {
                        report(where, "unexpected property '" + key + "'");
                    } else {
                        check(extra, child, path);
                    }
                }
            }
        }
        if (value.is_array() && schema.contains("items")) {
            for (std::size_t i = 0; i < value.size(); ++i) {
                check(schema["items"], value[i], where + "/" + std::to_string(i));
            }
        }
    }

    std::vector<std::string> errors;

private:
    void report(const std::string& where, const std::string& message) {
        errors.push_back((where.empty() ? "/" : where) + ": " + message);
    }

    const json& root_;
};

} // namespace

std::vector<std::string> validate_json_schema(const nlohmann::json& schema, const nlohmann::json& doc) {
    Validator v(schema);
    v.check(schema, doc, "");
    return std::move(v.errors);
}

} // namespace herdlens
