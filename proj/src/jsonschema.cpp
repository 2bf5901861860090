#include "dgl/jsonschema.hpp"

namespace dgl {

namespace {

using nlohmann::json;

bool type_matches(const json& doc, const std::string& type) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "number") return doc.is_number();
  if (type == "integer") return doc.is_number_integer();
  if (type == "boolean") return doc.is_boolean();
  if (type == "null") return doc.is_null();
  return false;
}

std::string validate(const json& doc, const json& schema,
                     const std::string& path) {
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    if (t.is_string() && !type_matches(doc, t.get<std::string>()))
      return path + ": expected type " + t.get<std::string>();
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& v : schema["enum"])
      if (v == doc) found = true;
    if (!found) return path + ": value not in enum";
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"])
        if (!doc.contains(key.get<std::string>()))
          return path + ": missing required key '" + key.get<std::string>() +
                 "'";
    }
    if (schema.contains("properties")) {
      for (auto it = schema["properties"].begin();
           it != schema["properties"].end(); ++it) {
        if (!doc.contains(it.key())) continue;
        std::string err =
            validate(doc[it.key()], it.value(), path + "/" + it.key());
        if (!err.empty()) return err;
      }
    }
  }
  if (doc.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      std::string err = validate(doc[i], schema["items"],
                                 path + "/" + std::to_string(i));
      if (!err.empty()) return err;
    }
  }
  return "";
}

}  // namespace

std::string validate_against_schema(const nlohmann::json& doc,
                                    const nlohmann::json& schema) {
  return validate(doc, schema, "$");
}

}  // namespace dgl
