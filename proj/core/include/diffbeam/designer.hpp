#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diffbeam/array_model.hpp"
#include "diffbeam/ideal_pattern.hpp"
#include "diffbeam/solvers.hpp"

namespace diffbeam {

enum class FrequencySpacing { Log, Linear };

struct FrequencyGrid {
  double min_hz = 200.0;
  double max_hz = 5000.0;
  int count = 49;
  FrequencySpacing spacing = FrequencySpacing::Log;
};

std::vector<double> make_frequency_grid(const FrequencyGrid& grid);

struct DesignSpec {
  int order = 0;
  double steer_theta_s = 0.0;         // rad
  std::vector<double> null_offsets;   // rad, ascending in (0, pi]
  double wng_slack_db = 10.0;
  std::vector<double> freq_grid = make_frequency_grid(FrequencyGrid{});
  double speed_of_sound = kDefaultSpeedOfSound;
  DesignMethod method = DesignMethod::INC;
};

// Throws Error(ConfigInvalid) naming the offending field.
void validate(const DesignSpec& spec, const ArrayGeometry& geom);

struct MetricsRow {
  double frequency_hz = 0.0;
  double df_db = 0.0;
  double wng_db = 0.0;
  double mse_db = 0.0;
  double wmax_db = 0.0;
  double zeta_wng_db = 0.0;
  double mainlobe_theta = 0.0;          // rad, argmax of |B| on a 0.5 degree grid
  std::vector<double> null_angles;      // rad, theta_s +/- each offset (merged at pi)
  std::vector<double> null_depths_db;   // min |B| within +/- 5 degrees of each null angle
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
};

struct MetricsReport {
  DesignSpec spec;
  ArrayGeometry geometry;
  IdealPattern pattern;
  std::vector<MetricsRow> rows;
};

struct BroadbandDesign {
  std::vector<std::optional<BeamformerFilter>> filters;  // parallel to report.rows
  MetricsReport report;
};

struct DesignOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Per-frequency design following: constraints -> h_mWNG and W_max -> zeta ->
// pattern, coherence and coupling -> NC or INC solve -> metrics. A failing
// frequency is recorded in its row status; DesignFailed is thrown only if
// every frequency fails.
BroadbandDesign design_broadband(const DesignSpec& spec, const ArrayGeometry& geom, const DesignOptions& options = {});

// Single-frequency variant used by the sweep; throws on failure.
std::pair<BeamformerFilter, MetricsRow> design_at_frequency(const DesignSpec& spec, const ArrayGeometry& geom,
                                                            const IdealPattern& pattern, double frequency_hz);

// Null directions used for depth reporting, in the order theta_s + o, theta_s - o.
std::vector<double> null_directions(double theta_s, const std::vector<double>& offsets);

// Main-lobe direction (rad in [0, 2pi)) as argmax of |B| on a uniform grid.
double mainlobe_direction(const ComplexVector& h, const ArrayGeometry& geom, double k, double step_deg = 0.5);

// Minimum of 20 log10 |B| within +/- window_deg of theta, sampled every step_deg.
double null_depth_db(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta,
                     double window_deg = 5.0, double step_deg = 0.5);

// Unsigned angular distance in radians, in [0, pi].
double angular_distance(double a, double b) noexcept;

// ---------------------------------------------------------------------------
// Configuration documents (JSON).

struct DesignConfig {
  DesignSpec spec;
  ArrayGeometry geometry;
};

// Parses and validates a design document. Angles are given in degrees.
// Defaults: wng_slack_db 10, speed_of_sound 340, 49 log-spaced points over
// 200-5000 Hz, method inc. Throws Error(ConfigInvalid).
DesignConfig parse_design_config(const std::string& document);
DesignConfig load_design_config(const std::string& path);

}  // namespace diffbeam
