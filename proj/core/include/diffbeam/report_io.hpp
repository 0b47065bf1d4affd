#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diffbeam/designer.hpp"

namespace diffbeam {

// frequency_hz,df_db,wng_db,mse_db,wmax_db,mainlobe_deg,status
void write_metrics_csv(std::ostream& out, const MetricsReport& report);

// Per-null depths and pattern echo as JSON, for scoring without re-running.
void write_report_json(std::ostream& out, const MetricsReport& report);

/// One exported filter, as written to and read from the filters document:
/// { "frequency_hz", "method", "zeta_wng_db", "weights": [{"re","im"}...],
///   "achieved_wng_db", "mse_db" }
struct FilterRecord {
  double frequency_hz = 0.0;
  DesignMethod method = DesignMethod::INC;
  std::optional<double> zeta_wng_db;
  ComplexVector weights;
  double achieved_wng_db = 0.0;
  double mse_db = 0.0;
};

std::vector<FilterRecord> filter_records(const BroadbandDesign& design);

// {"design": {...}, "filters": [FilterRecord...]}
void write_filters_json(std::ostream& out, const BroadbandDesign& design);
std::vector<FilterRecord> read_filters_json(std::istream& in);

// theta_deg,frequency_hz,magnitude_db with theta in 1 degree steps over
// [0, 360) and magnitudes floored at -60 dB.
void write_beampattern_grid_csv(std::ostream& out, const BroadbandDesign& design, double step_deg = 1.0,
                                double floor_db = -60.0);

// Fixed-precision number formatting shared by every CSV writer.
std::string format_number(double value, int decimals = 6);

}  // namespace diffbeam
