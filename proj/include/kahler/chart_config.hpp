#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kahler/modelspace.hpp"

namespace kahler::model {

/// Serializable description of a chart.
///
/// JSON schema (see docs/schemas.md):
///   {"label": "flat" | "fubini_study" | "complex_hyperbolic" | "product",
///    "n": int, "K": number, "factors": [ <chart>, ... ]}
/// `n` and `K` are required for the three space forms; `factors` only for
/// products, whose `n` (if given) must equal the sum of factor dimensions.
struct ChartSpec {
  std::string label = "flat";
  int n = 1;
  double K = 0.0;
  std::vector<ChartSpec> factors;
};

ChartSpec chart_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChartSpec& spec);
ChartPtr build_chart(const ChartSpec& spec);

}  // namespace kahler::model
