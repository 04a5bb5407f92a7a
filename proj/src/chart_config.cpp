#include "kahler/chart_config.hpp"

#include <stdexcept>

namespace kahler::model {

ChartSpec chart_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("chart spec: expected a JSON object");
  ChartSpec s;
  if (!j.contains("label")) throw std::invalid_argument("chart spec: missing 'label'");
  s.label = j.at("label").get<std::string>();
  if (s.label == "product") {
    if (!j.contains("factors") || !j.at("factors").is_array() || j.at("factors").empty()) {
      throw std::invalid_argument("chart spec: product needs a non-empty 'factors' array");
    }
    int total = 0;
    for (const auto& f : j.at("factors")) {
      s.factors.push_back(chart_spec_from_json(f));
      total += s.factors.back().n;
    }
    if (j.contains("n") && j.at("n").get<int>() != total) {
      throw std::invalid_argument("chart spec: product 'n' disagrees with its factors");
    }
    s.n = total;
    s.K = 0.0;
    return s;
  }
  if (s.label != "flat" && s.label != "fubini_study" && s.label != "complex_hyperbolic") {
    throw std::invalid_argument("chart spec: unknown label '" + s.label + "'");
  }
  if (!j.contains("n")) throw std::invalid_argument("chart spec: missing 'n'");
  s.n = j.at("n").get<int>();
  if (s.n <= 0) throw std::invalid_argument("chart spec: 'n' must be positive");
  s.K = j.value("K", 0.0);
  if (s.label == "flat" && s.K != 0.0) throw std::invalid_argument("chart spec: flat needs K = 0");
  if (s.label == "fubini_study" && !(s.K > 0.0)) {
    throw std::invalid_argument("chart spec: fubini_study needs K > 0");
  }
  if (s.label == "complex_hyperbolic" && !(s.K < 0.0)) {
    throw std::invalid_argument("chart spec: complex_hyperbolic needs K < 0");
  }
  return s;
}

nlohmann::json to_json(const ChartSpec& spec) {
  nlohmann::json j;
  j["label"] = spec.label;
  j["n"] = spec.n;
  if (spec.label == "product") {
    j["factors"] = nlohmann::json::array();
    for (const auto& f : spec.factors) j["factors"].push_back(to_json(f));
  } else {
    j["K"] = spec.K;
  }
  return j;
}

ChartPtr build_chart(const ChartSpec& spec) {
  if (spec.label == "product") {
    std::vector<ChartPtr> f;
    for (const auto& s : spec.factors) f.push_back(build_chart(s));
    return make_product(std::move(f));
  }
  if (spec.label == "flat") return make_flat(spec.n);
  if (spec.label == "fubini_study") return make_fubini_study(spec.n, spec.K);
  if (spec.label == "complex_hyperbolic") return make_complex_hyperbolic(spec.n, spec.K);
  throw std::invalid_argument("build_chart: unknown label '" + spec.label + "'");
}

}  // namespace kahler::model
