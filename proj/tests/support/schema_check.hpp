#pragma once

#include <string>

#include <nlohmann/json.hpp>

// Validates a document against the subset of JSON Schema the shipped schemas
// use: type (string or array of strings), required, properties,
// additionalProperties (schema form), items, enum, minimum.
namespace custprof::testing {

struct SchemaResult {
    bool ok = true;
    std::string error;
};

SchemaResult checkSchema(const nlohmann::json& schema, const nlohmann::json& doc,
                         const std::string& path = "$");

// Loads the schema file and validates; throws on file errors.
SchemaResult checkSchemaFile(const std::string& schemaPath, const nlohmann::json& doc);

}  // namespace custprof::testing
