#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fusionhar {

// Validates the draft-07 keywords used by the committed report schemas:
// $ref (local pointers), type, required, properties, additionalProperties,
// items, enum, const, minimum, maximum, minItems, maxItems, minProperties.
// Returns human-readable violations; empty means valid.
class SchemaValidator {
 public:
  explicit SchemaValidator(nlohmann::json schema) : schema_(std::move(schema)) {}

  std::vector<std::string> validate(const nlohmann::json& doc) const {
    std::vector<std::string> errors;
    check(schema_, doc, "$", errors);
    return errors;
  }

 private:
  static bool type_matches(const std::string& type, const nlohmann::json& v) {
    if (type == "object") return v.is_object();
    if (type == "array") return v.is_array();
    if (type == "string") return v.is_string();
    if (type == "boolean") return v.is_boolean();
    if (type == "null") return v.is_null();
    if (type == "number") return v.is_number();
    if (type == "integer") {
      if (v.is_number_integer()) return true;
      return v.is_number_float() && std::floor(v.get<double>()) == v.get<double>();
    }
    return false;
  }

  void check(const nlohmann::json& s, const nlohmann::json& v, const std::string& path,
             std::vector<std::string>& errors) const {
    if (s.is_object() && s.contains("$ref")) {
      const auto ref = s["$ref"].get<std::string>();
      if (ref.empty() || ref.front() != '#') {
        errors.push_back(path + ": unsupported $ref '" + ref + "'");
        return;
      }
      const nlohmann::json::json_pointer ptr(ref.substr(1));
      if (!schema_.contains(ptr)) {
        errors.push_back(path + ": unresolved $ref '" + ref + "'");
        return;
      }
      check(schema_.at(ptr), v, path, errors);
      return;
    }
    if (s.is_boolean()) {
      if (!s.get<bool>()) errors.push_back(path + ": no value allowed");
      return;
    }
    if (s.contains("type")) {
      const auto& t = s["type"];
      bool ok = false;
      if (t.is_string()) ok = type_matches(t.get<std::string>(), v);
      else
        for (const auto& alt : t) ok = ok || type_matches(alt.get<std::string>(), v);
      if (!ok) {
        errors.push_back(path + ": expected type " + t.dump());
        return;
      }
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) errors.push_back(path + ": value not in enum");
    }
    if (s.contains("const") && s["const"] != v) errors.push_back(path + ": value differs from const");
    if (v.is_number()) {
      const double x = v.get<double>();
      if (s.contains("minimum") && x < s["minimum"].get<double>())
        errors.push_back(path + ": below minimum " + s["minimum"].dump());
      if (s.contains("maximum") && x > s["maximum"].get<double>())
        errors.push_back(path + ": above maximum " + s["maximum"].dump());
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>())
        errors.push_back(path + ": fewer than " + s["minItems"].dump() + " items");
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>())
        errors.push_back(path + ": more than " + s["maxItems"].dump() + " items");
      if (s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) check(s["items"], v[i], path + "[" + std::to_string(i) + "]", errors);
    }
    if (v.is_object()) {
      if (s.contains("minProperties") && v.size() < s["minProperties"].get<std::size_t>())
        errors.push_back(path + ": too few properties");
      if (s.contains("required"))
        for (const auto& r : s["required"])
          if (!v.contains(r.get<std::string>())) errors.push_back(path + ": missing required '" + r.get<std::string>() + "'");
      const nlohmann::json* props = s.contains("properties") ? &s["properties"] : nullptr;
      for (const auto& [key, child] : v.items()) {
        const std::string sub = path + "." + key;
        if (props && props->contains(key)) {
          check((*props)[key], child, sub, errors);
        } else if (s.contains("additionalProperties")) {
          check(s["additionalProperties"], child, sub, errors);
        }
      }
    }
  }

  nlohmann::json schema_;
};

}  // namespace fusionhar
