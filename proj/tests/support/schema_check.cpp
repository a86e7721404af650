#include "schema_check.hpp"

#include <fstream>

namespace custprof::testing {

namespace {

using nlohmann::json;

bool typeMatches(const std::string& type, const json& doc) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
}

SchemaResult fail(const std::string& path, const std::string& message) {
    return {false, path + ": " + message};
}

}  // namespace

SchemaResult checkSchema(const json& schema, const json& doc, const std::string& path) {
    if (schema.contains("type")) {
        const auto& type = schema.at("type");
        bool ok = false;
        if (type.is_string()) {
            ok = typeMatches(type.get<std::string>(), doc);
        } else {
            for (const auto& t : type) ok = ok || typeMatches(t.get<std::string>(), doc);
        }
        if (!ok) return fail(path, "type mismatch (got " + std::string(doc.type_name()) + ")");
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& v : schema.at("enum")) ok = ok || v == doc;
        if (!ok) return fail(path, "value not in enum");
    }
    if (schema.contains("minimum") && doc.is_number()) {
        if (doc.get<double>() < schema.at("minimum").get<double>()) {
            return fail(path, "below minimum");
        }
    }
    if (doc.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema.at("required")) {
                if (!doc.contains(key.get<std::string>())) {
                    return fail(path, "missing required key '" + key.get<std::string>() + "'");
                }
            }
        }
        const json* props = schema.contains("properties") ? &schema.at("properties") : nullptr;
        const json* extra = schema.contains("additionalProperties") &&
                                    schema.at("additionalProperties").is_object()
                                ? &schema.at("additionalProperties")
                                : nullptr;
        for (const auto& [key, value] : doc.items()) {
            if (props && props->contains(key)) {
                const auto r = checkSchema(props->at(key), value, path + "." + key);
                if (!r.ok) return r;
            } else if (extra) {
                const auto r = checkSchema(*extra, value, path + "." + key);
                if (!r.ok) return r;
            }
        }
    }
    if (doc.is_array() && schema.contains("items")) {
        std::size_t i = 0;
        for (const auto& item : doc) {
            const auto r = checkSchema(schema.at("items"), item, path + "[" + std::to_string(i) +
                                                                     "]");
            if (!r.ok) return r;
            ++i;
        }
    }
    return {};
}

SchemaResult checkSchemaFile(const std::string& schemaPath, const json& doc) {
    std::ifstream in(schemaPath);
    if (!in) return {false, "cannot open schema: " + schemaPath};
    json schema;
    in >> schema;
    return checkSchema(schema, doc);
}

}  // namespace custprof::testing
