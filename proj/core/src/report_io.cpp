#include "diffbeam/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "diffbeam/error.hpp"
#include "diffbeam/metrics.hpp"

namespace diffbeam {
namespace {

using nlohmann::json;

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json design_echo(const MetricsReport& report) {
  const auto& spec = report.spec;
  json nulls = json::array();
  for (double o : spec.null_offsets) nulls.push_back(rad_to_deg(o));
  json elements = json::array();
  for (const auto& e : report.geometry.elements()) elements.push_back({{"x_m", e.position_x}, {"a", e.directivity_a}});
  json coeffs = json::array();
  for (Eigen::Index n = 0; n < report.pattern.coeffs().size(); ++n) coeffs.push_back(report.pattern.coeffs()(n));
  return {
      {"order", spec.order},
      {"steer_deg", rad_to_deg(spec.steer_theta_s)},
      {"nulls_deg", nulls},
      {"wng_slack_db", spec.wng_slack_db},
      {"speed_of_sound", spec.speed_of_sound},
      {"method", std::string(to_string(spec.method))},
      {"pattern_coeffs", coeffs},
      {"ideal_df_db", ideal_directivity_factor_db(report.pattern)},
      {"array", elements},
  };
}

}  // namespace

std::string format_number(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  std::string s(buf);
  if (s == "-0." + std::string(static_cast<std::size_t>(decimals), '0')) s.erase(0, 1);
  return s;
}

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
  out << "frequency_hz,df_db,wng_db,mse_db,wmax_db,mainlobe_deg,status\n";
  for (const auto& r : report.rows) {
    out << format_number(r.frequency_hz, 3) << ',' << format_number(r.df_db) << ',' << format_number(r.wng_db) << ','
        << format_number(r.mse_db) << ',' << format_number(r.wmax_db) << ','
        << format_number(rad_to_deg(r.mainlobe_theta), 1) << ',' << r.status << '\n';
  }
}

void write_report_json(std::ostream& out, const MetricsReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json nulls = json::array();
    for (std::size_t i = 0; i < r.null_angles.size(); ++i) {
      nulls.push_back({{"theta_deg", rad_to_deg(r.null_angles[i])}, {"depth_db", nullable(r.null_depths_db[i])}});
    }
    rows.push_back({
        {"frequency_hz", r.frequency_hz},
        {"df_db", nullable(r.df_db)},
        {"wng_db", nullable(r.wng_db)},
        {"mse_db", nullable(r.mse_db)},
        {"wmax_db", nullable(r.wmax_db)},
        {"zeta_wng_db", nullable(r.zeta_wng_db)},
        {"mainlobe_deg", nullable(rad_to_deg(r.mainlobe_theta))},
        {"nulls", nulls},
        {"status", r.status},
    });
  }
  out << json{{"design", design_echo(report)}, {"rows", rows}}.dump(2) << '\n';
}

std::vector<FilterRecord> filter_records(const BroadbandDesign& design) {
  std::vector<FilterRecord> out;
  for (std::size_t i = 0; i < design.filters.size(); ++i) {
    if (!design.filters[i]) continue;
    const auto& f = *design.filters[i];
    out.push_back({f.frequency_hz, f.method, f.zeta_wng_db, f.weights, f.achieved_wng_db, design.report.rows[i].mse_db});
  }
  return out;
}

void write_filters_json(std::ostream& out, const BroadbandDesign& design) {
  json filters = json::array();
  for (const auto& rec : filter_records(design)) {
    json weights = json::array();
    for (Eigen::Index m = 0; m < rec.weights.size(); ++m) {
      weights.push_back({{"re", rec.weights(m).real()}, {"im", rec.weights(m).imag()}});
    }
    filters.push_back({
        {"frequency_hz", rec.frequency_hz},
        {"method", std::string(to_string(rec.method))},
        {"zeta_wng_db", rec.zeta_wng_db ? nullable(*rec.zeta_wng_db) : json(nullptr)},
        {"weights", weights},
        {"achieved_wng_db", nullable(rec.achieved_wng_db)},
        {"mse_db", nullable(rec.mse_db)},
    });
  }
  out << json{{"design", design_echo(design.report)}, {"filters", filters}}.dump(2) << '\n';
}

std::vector<FilterRecord> read_filters_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("filters document: ") + e.what());
  }
  const auto as_double = [](const json& v) {
    return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  };
  std::vector<FilterRecord> out;
  try {
    const auto& list = doc.is_array() ? doc : doc.at("filters");
    for (const auto& f : list) {
      FilterRecord rec;
      rec.frequency_hz = f.at("frequency_hz").get<double>();
      const auto method = parse_design_method(f.at("method").get<std::string>());
      if (!method) throw Error(ErrorCode::ConfigInvalid, "filters document: unknown method");
      rec.method = *method;
      if (f.contains("zeta_wng_db") && !f.at("zeta_wng_db").is_null()) rec.zeta_wng_db = f.at("zeta_wng_db").get<double>();
      const auto& w = f.at("weights");
      rec.weights.resize(static_cast<Eigen::Index>(w.size()));
      for (std::size_t m = 0; m < w.size(); ++m) {
        rec.weights(static_cast<Eigen::Index>(m)) = Complex(w[m].at("re").get<double>(), w[m].at("im").get<double>());
      }
      rec.achieved_wng_db = f.contains("achieved_wng_db") ? as_double(f.at("achieved_wng_db")) : 0.0;
      rec.mse_db = f.contains("mse_db") ? as_double(f.at("mse_db")) : 0.0;
      out.push_back(std::move(rec));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("filters document: ") + e.what());
  }
  return out;
}

void write_beampattern_grid_csv(std::ostream& out, const BroadbandDesign& design, double step_deg, double floor_db) {
  out << "theta_deg,frequency_hz,magnitude_db\n";
  const auto& geom = design.report.geometry;
  const double c = design.report.spec.speed_of_sound;
  const int points = static_cast<int>(std::lround(360.0 / step_deg));
  for (const auto& f : design.filters) {
    if (!f) continue;
    const double k = wavenumber(f->frequency_hz, c);
    for (int i = 0; i < points; ++i) {
      const double theta_deg = i * step_deg;
      const double mag = std::abs(beampattern(f->weights, geom, k, deg_to_rad(theta_deg)));
      const double db = std::max(floor_db, 20.0 * std::log10(std::max(mag, 1e-300)));
      out << format_number(theta_deg, 1) << ',' << format_number(f->frequency_hz, 3) << ',' << format_number(db, 3)
          << '\n';
    }
  }
}

}  // namespace diffbeam
