#pragma once

// JSON wire formats for results. Feature indices are 1-based on the wire.

#include <string>

#include "drxp/enumerate.hpp"
#include "drxp/explain.hpp"

namespace drxp {

std::string kind_name(ExplanationKind kind);
ExplanationKind kind_from_name(const std::string& name);

std::string explanation_to_json(const Explanation& xp);
std::string enumeration_to_json(const EnumerationResult& result);

// Parses a JSON array of 1-based feature indices.
FeatureSet feature_set_from_json(const std::string& json_text, int m);

}  // namespace drxp
