#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace bwrk {

// Minimal JSON-schema checker: supports the subset used by the shipped
// schemas (type, properties, required, items, enum, minimum/maximum).
// Returns a list of violations; empty means valid.
inline void validate_schema_impl(const nlohmann::json& value, const nlohmann::json& schema,
                                 const std::string& path, std::vector<std::string>& errors) {
    using nlohmann::json;

    auto type_matches = [&](const std::string& t) {
        if (t == "object") return value.is_object();
        if (t == "array") return value.is_array();
        if (t == "string") return value.is_string();
        if (t == "number") return value.is_number();
        if (t == "integer") return value.is_number_integer() || value.is_number_unsigned();
        if (t == "boolean") return value.is_boolean();
        if (t == "null") return value.is_null();
        return false;
    };

    if (schema.contains("type")) {
        const auto& t = schema.at("type");
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(t.get<std::string>());
        } else if (t.is_array()) {
            for (const auto& alt : t)
                if (type_matches(alt.get<std::string>())) { ok = true; break; }
        }
        if (!ok) {
            errors.push_back(path + ": type mismatch (expected " + t.dump() + ")");
            return;
        }
    }

    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& candidate : schema.at("enum"))
            if (candidate == value) { ok = true; break; }
        if (!ok) errors.push_back(path + ": value not in enum");
    }

    if (value.is_number()) {
        if (schema.contains("minimum") && value.get<double>() < schema.at("minimum").get<double>())
            errors.push_back(path + ": below minimum");
        if (schema.contains("maximum") && value.get<double>() > schema.at("maximum").get<double>())
            errors.push_back(path + ": above maximum");
    }

    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema.at("required"))
                if (!value.contains(key.get<std::string>()))
                    errors.push_back(path + ": missing required key '" + key.get<std::string>() +
                                     "'");
        if (schema.contains("properties")) {
            for (const auto& [key, sub] : schema.at("properties").items())
                if (value.contains(key))
                    validate_schema_impl(value.at(key), sub, path + "/" + key, errors);
        }
    }

    if (value.is_array() && schema.contains("items")) {
        const auto& item_schema = schema.at("items");
        for (std::size_t i = 0; i < value.size(); ++i)
            validate_schema_impl(value[i], item_schema, path + "/" + std::to_string(i), errors);
    }
}

inline std::vector<std::string> validate_schema(const nlohmann::json& value,
                                                const nlohmann::json& schema) {
    std::vector<std::string> errors;
    validate_schema_impl(value, schema, "#", errors);
    return errors;
}

} // namespace bwrk
