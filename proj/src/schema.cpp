#include "hodomap/scenario.hpp"

#include "report_schema.inc"  // kReportSchema, generated from schemas/report.schema.json

namespace hodomap {

using nlohmann::json;

const json& report_schema() {
  static const json schema = json::parse(kReportSchema);
  return schema;
}

namespace {

bool has_type(const json& x, const std::string& t) {
  if (t == "object") return x.is_object();
  if (t == "array") return x.is_array();
  if (t == "string") return x.is_string();
  if (t == "boolean") return x.is_boolean();
  if (t == "integer") return x.is_number_integer();
  if (t == "number") return x.is_number();
  if (t == "null") return x.is_null();
  return false;
}

void check(const json& x, const json& s, const std::string& at, std::vector<std::string>& out) {
  if (s.contains("anyOf")) {
    for (const auto& alt : s["anyOf"]) {
      std::vector<std::string> sub;
      check(x, alt, at, sub);
      if (sub.empty()) return;
    }
    out.push_back(at + ": matches no alternative");
    return;
  }
  if (s.contains("type") && !has_type(x, s["type"].get<std::string>())) {
    out.push_back(at + ": expected " + s["type"].get<std::string>());
    return;
  }
  if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), x) == s["enum"].end())
    out.push_back(at + ": value not in enum");
  if (s.contains("minimum") && x.is_number() && x.get<double>() < s["minimum"].get<double>())
    out.push_back(at + ": below minimum");
  if (x.is_object()) {
    if (s.contains("required"))
      for (const auto& key : s["required"])
        if (!x.contains(key.get<std::string>())) out.push_back(at + ": missing " + key.get<std::string>());
    const json* props = s.contains("properties") ? &s["properties"] : nullptr;
    bool closed = s.contains("additionalProperties") && s["additionalProperties"] == false;
    for (const auto& [key, val] : x.items()) {
      if (props && props->contains(key)) check(val, (*props)[key], at + "/" + key, out);
      else if (closed) out.push_back(at + ": unexpected key " + key);
    }
  }
  if (x.is_array() && s.contains("items"))
    for (std::size_t i = 0; i < x.size(); ++i) check(x[i], s["items"], at + "/" + std::to_string(i), out);
}

}  // namespace

std::vector<std::string> validate_against_schema(const json& instance, const json& schema) {
  std::vector<std::string> out;
  check(instance, schema, "", out);
  return out;
}

}  // namespace hodomap
