#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "diffbeam/designer.hpp"
#include "diffbeam/error.hpp"

namespace diffbeam {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + message);
}

double number_field(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "must be finite");
  return d;
}

int integer_field(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
  }
}

ArrayGeometry parse_array(const json& arr) {
  if (!arr.is_object()) fail("array", "expected an object");
  reject_unknown(arr, {"spacing_m", "elements", "positions_m"}, "array");
  if (!arr.contains("elements")) fail("array.elements", "missing");
  const auto& elems = arr.at("elements");
  if (!elems.is_array() || elems.empty()) fail("array.elements", "expected a non-empty array");

  std::vector<double> a;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const std::string path = "array.elements[" + std::to_string(i) + "]";
    const auto& e = elems[i];
    if (e.is_string()) {
      const auto type = parse_microphone_type(e.get<std::string>());
      if (!type) fail(path, "unknown microphone type '" + e.get<std::string>() + "'");
      a.push_back(directivity_coefficient(*type));
    } else if (e.is_object() && e.contains("a") && e.at("a").is_number()) {
      const double value = e.at("a").get<double>();
      if (!(value >= 0.0 && value <= 1.0)) fail(path + ".a", "directivity coefficient must lie in [0, 1]");
      a.push_back(value);
    } else {
      fail(path, "expected a microphone type name or {\"a\": number}");
    }
  }

  const bool has_spacing = arr.contains("spacing_m");
  const bool has_positions = arr.contains("positions_m");
  if (has_spacing == has_positions) fail("array", "give exactly one of spacing_m or positions_m");
  try {
    if (has_spacing) {
      const double spacing = number_field(arr, "spacing_m", "array.spacing_m");
      if (!(spacing > 0.0)) fail("array.spacing_m", "must be > 0");
      return ArrayGeometry::uniform(spacing, a);
    }
    const auto x = number_list(arr.at("positions_m"), "array.positions_m");
    if (x.size() != a.size()) fail("array.positions_m", "length must match array.elements");
    std::vector<MicrophoneElement> elements;
    for (std::size_t i = 0; i < x.size(); ++i) elements.push_back({x[i], a[i]});
    return ArrayGeometry(std::move(elements));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    fail("array", e.what());
  }
}

std::vector<double> parse_frequencies(const json& doc) {
  if (doc.contains("frequencies_hz")) {
    if (doc.contains("frequencies")) fail("frequencies", "give either frequencies or frequencies_hz, not both");
    return number_list(doc.at("frequencies_hz"), "frequencies_hz");
  }
  FrequencyGrid grid;
  if (doc.contains("frequencies")) {
    const auto& f = doc.at("frequencies");
    if (!f.is_object()) fail("frequencies", "expected an object");
    reject_unknown(f, {"min_hz", "max_hz", "count", "spacing"}, "frequencies");
    if (f.contains("min_hz")) grid.min_hz = number_field(f, "min_hz", "frequencies.min_hz");
    if (f.contains("max_hz")) grid.max_hz = number_field(f, "max_hz", "frequencies.max_hz");
    if (f.contains("count")) grid.count = integer_field(f, "count", "frequencies.count");
    if (f.contains("spacing")) {
      const auto& s = f.at("spacing");
      if (s == "log") {
        grid.spacing = FrequencySpacing::Log;
      } else if (s == "linear") {
        grid.spacing = FrequencySpacing::Linear;
      } else {
        fail("frequencies.spacing", "expected \"log\" or \"linear\"");
      }
    }
  }
  return make_frequency_grid(grid);
}

}  // namespace

DesignConfig parse_design_config(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    fail("document", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("document", "expected a JSON object");
  reject_unknown(doc,
                 {"name", "order", "steer_deg", "nulls_deg", "wng_slack_db", "speed_of_sound", "method", "frequencies",
                  "frequencies_hz", "array", "perturbation", "evaluation"},
                 "");

  try {
    DesignSpec spec;
    if (!doc.contains("steer_deg")) fail("steer_deg", "missing");
    spec.steer_theta_s = deg_to_rad(number_field(doc, "steer_deg", "steer_deg"));

    if (!doc.contains("nulls_deg")) fail("nulls_deg", "missing");
    const auto nulls = number_list(doc.at("nulls_deg"), "nulls_deg");
    for (std::size_t i = 0; i < nulls.size(); ++i) {
      if (!(nulls[i] > 0.0 && nulls[i] <= 180.0)) {
        fail("nulls_deg[" + std::to_string(i) + "]", "offset must be in (0, 180] degrees");
      }
      if (i > 0 && !(nulls[i] > nulls[i - 1])) fail("nulls_deg", "offsets must be distinct and ascending");
      // Exact pi for a 180 degree offset so the opposite-null merge triggers.
      spec.null_offsets.push_back(nulls[i] == 180.0 ? kPi : deg_to_rad(nulls[i]));
    }

    spec.order = doc.contains("order") ? integer_field(doc, "order", "order") : static_cast<int>(nulls.size());
    if (spec.order < 0) fail("order", "must be non-negative");
    if (static_cast<std::size_t>(spec.order) != nulls.size()) {
      fail("order", "order " + std::to_string(spec.order) + " does not match " + std::to_string(nulls.size()) +
                        " null offsets");
    }

    if (doc.contains("wng_slack_db")) spec.wng_slack_db = number_field(doc, "wng_slack_db", "wng_slack_db");
    if (doc.contains("speed_of_sound")) spec.speed_of_sound = number_field(doc, "speed_of_sound", "speed_of_sound");
    if (doc.contains("method")) {
      const auto& m = doc.at("method");
      const auto method = m.is_string() ? parse_design_method(m.get<std::string>()) : std::nullopt;
      if (!method || *method == DesignMethod::MWNG) fail("method", "expected \"inc\" or \"nc\"");
      spec.method = *method;
    }
    spec.freq_grid = parse_frequencies(doc);

    if (!doc.contains("array")) fail("array", "missing");
    auto geom = parse_array(doc.at("array"));
    validate(spec, geom);
    return DesignConfig{std::move(spec), std::move(geom)};
  } catch (const json::exception& e) {
    fail("document", e.what());
  }
}

DesignConfig load_design_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_design_config(buf.str());
}

}  // namespace diffbeam
