#pragma once

#include <string>

#include <json.hpp>

namespace dgl {

// Structural validation against the subset of JSON Schema the shipped
// schemas use: "type", "properties", "required", "items", "enum".
// Returns an empty string on success, else the first violation path.
std::string validate_against_schema(const nlohmann::json& doc,
                                    const nlohmann::json& schema);

}  // namespace dgl
