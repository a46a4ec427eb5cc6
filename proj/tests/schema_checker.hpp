#pragma once

#include <string>

#include "json.hpp"

// Minimal JSON-schema checker covering the subset the report schema uses:
// type, required, properties, items, enum, const, oneOf, $ref into
// definitions, minimum/maximum and their exclusive forms.
class SchemaChecker {
  public:
    explicit SchemaChecker(nlohmann::json schema) : root_(std::move(schema)) {}

    bool validate(const nlohmann::json& value) const { return check(root_, value); }

  private:
    nlohmann::json root_;

    const nlohmann::json& resolve(const nlohmann::json& schema) const {
        if (schema.contains("$ref")) {
            std::string ref = schema["$ref"];
            // only local refs of the form #/definitions/name
            std::string key = ref.substr(ref.rfind('/') + 1);
            return root_["definitions"].at(key);
        }
        return schema;
    }

    static bool type_matches(const std::string& type, const nlohmann::json& v) {
        if (type == "object") return v.is_object();
        if (type == "array") return v.is_array();
        if (type == "string") return v.is_string();
        if (type == "boolean") return v.is_boolean();
        if (type == "integer") return v.is_number_integer() || v.is_number_unsigned();
        if (type == "number") return v.is_number();
        return false;
    }

    bool check(const nlohmann::json& schema_in, const nlohmann::json& v) const {
        const nlohmann::json& schema = resolve(schema_in);
        if (schema.contains("type") && !type_matches(schema["type"], v)) return false;
        if (schema.contains("const") && v != schema["const"]) return false;
        if (schema.contains("enum")) {
            bool hit = false;
            for (const auto& e : schema["enum"]) hit = hit || v == e;
            if (!hit) return false;
        }
        if (v.is_number()) {
            double x = v.get<double>();
            if (schema.contains("minimum") && x < schema["minimum"].get<double>()) return false;
            if (schema.contains("maximum") && x > schema["maximum"].get<double>()) return false;
            if (schema.contains("exclusiveMinimum") &&
                x <= schema["exclusiveMinimum"].get<double>())
                return false;
            if (schema.contains("exclusiveMaximum") &&
                x >= schema["exclusiveMaximum"].get<double>())
                return false;
        }
        if (schema.contains("required")) {
            if (!v.is_object()) return false;
            for (const auto& key : schema["required"])
                if (!v.contains(key.get<std::string>())) return false;
        }
        if (schema.contains("properties") && v.is_object()) {
            for (const auto& [key, sub] : schema["properties"].items())
                if (v.contains(key) && !check(sub, v.at(key))) return false;
        }
        if (schema.contains("items") && v.is_array()) {
            for (const auto& item : v)
                if (!check(schema["items"], item)) return false;
        }
        if (schema.contains("oneOf")) {
            int hits = 0;
            for (const auto& branch : schema["oneOf"])
                if (check(branch, v)) ++hits;
            if (hits != 1) return false;
        }
        return true;
    }
};
