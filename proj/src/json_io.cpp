#include "drxp/json_io.hpp"

#include "json.hpp"

namespace drxp {

using nlohmann::json;

std::string kind_name(ExplanationKind kind) {
  switch (kind) {
    case ExplanationKind::AXp:
      return "axp";
    case ExplanationKind::WAXp:
      return "waxp";
    case ExplanationKind::CXp:
      return "cxp";
    case ExplanationKind::WCXp:
      return "wcxp";
  }
  throw Error("unreachable explanation kind");
}

ExplanationKind kind_from_name(const std::string& name) {
  if (name == "axp") return ExplanationKind::AXp;
  if (name == "waxp") return ExplanationKind::WAXp;
  if (name == "cxp") return ExplanationKind::CXp;
  if (name == "wcxp") return ExplanationKind::WCXp;
  throw ParseError("unknown explanation kind: " + name);
}

namespace {

json features_1based(const FeatureSet& s) {
  json arr = json::array();
  for (int i : s) arr.push_back(i + 1);
  return arr;
}

json stats_json(const ExplanationStats& stats) {
  json j;
  j["oracle_calls"] = stats.oracle_calls;
  j["timeouts"] = stats.timeouts;
  j["total_seconds"] = stats.total_seconds;
  j["per_call_seconds"] = stats.per_call_seconds;
  return j;
}

}  // namespace

std::string explanation_to_json(const Explanation& xp) {
  json j;
  j["kind"] = kind_name(xp.kind);
  j["features"] = features_1based(xp.features);
  j["minimal_guaranteed"] = xp.minimal_guaranteed;
  j["stats"] = stats_json(xp.stats);
  return j.dump();
}

std::string enumeration_to_json(const EnumerationResult& result) {
  json j;
  j["axps"] = json::array();
  for (const auto& a : result.axps) j["axps"].push_back(features_1based(a));
  j["cxps"] = json::array();
  for (const auto& c : result.cxps) j["cxps"].push_back(features_1based(c));
  j["complete"] = result.complete;
  j["stats"] = stats_json(result.stats);
  return j.dump();
}

FeatureSet feature_set_from_json(const std::string& json_text, int m) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad feature set JSON: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("feature set must be a JSON array");
  std::vector<int> idx;
  for (const auto& e : j) {
    if (!e.is_number_integer())
      throw ParseError("feature indices must be integers");
    int i = e.get<int>();
    if (i < 1 || i > m)
      throw ParseError("feature index " + std::to_string(i) +
                       " out of range 1.." + std::to_string(m));
    idx.push_back(i - 1);
  }
  return FeatureSet(std::move(idx));
}

}  // namespace drxp
