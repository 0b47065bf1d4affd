#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "diffbeam/array_model.hpp"
#include "diffbeam/types.hpp"

namespace diffbeam {

// Reproducible generator for every synthesized quantity.
using Rng = std::mt19937_64;

/// Microphone imperfections for synthetic measurements. Gains are lognormal
/// (normal in dB), phases normal in degrees, positions normal in metres; all
/// are drawn once per microphone in index order. Sensor noise, when set, is
/// complex circular Gaussian with the given power relative to a unit signal.
struct PerturbationModel {
  double gain_sigma_db = 0.0;
  double phase_sigma_deg = 0.0;
  double position_sigma_m = 0.0;
  std::optional<double> sensor_noise_db;
  std::uint64_t seed = 0;

  void validate() const;  // throws InvalidArgument on negative sigmas
  bool is_zero() const noexcept;
};

// Reads the optional "perturbation" object of a design document; an absent
// object yields the zero model. Throws Error(ConfigInvalid).
PerturbationModel parse_perturbation_config(const std::string& document);

// One realisation of the per-microphone errors.
struct MicrophoneMismatch {
  std::vector<Complex> factors;   // gain * exp(j phase)
  std::vector<double> positions;  // jittered x_m
};

MicrophoneMismatch draw_mismatch(const PerturbationModel& model, const ArrayGeometry& geom, Rng& rng);
MicrophoneMismatch no_mismatch(const ArrayGeometry& geom);

ComplexVector mismatched_steering_vector(const ArrayGeometry& geom, const MicrophoneMismatch& mismatch, double k,
                                         double theta);

/// Transfer functions from plane waves on a rotation grid, one complex vector
/// per angle, in the form a turntable measurement would deliver them.
struct MeasuredSteeringSet {
  std::vector<double> angles_deg;
  std::vector<ComplexVector> vectors;
  double frequency_hz = 0.0;

  std::size_t mics() const noexcept { return vectors.empty() ? 0 : static_cast<std::size_t>(vectors.front().size()); }
};

// 0, step, ..., 360 inclusive (73 points for 5 degrees).
std::vector<double> measurement_angles_deg(double step_deg = 5.0);

MeasuredSteeringSet synth_steering_set(const ArrayGeometry& geom, double frequency_hz, const PerturbationModel& perturb,
                                       double speed_of_sound = kDefaultSpeedOfSound, double step_deg = 5.0);

// h^H v for every measured vector v. Throws DimensionMismatch.
std::vector<Complex> offline_beampattern(const MeasuredSteeringSet& set, const ComplexVector& h);

struct OfflineNull {
  double target_deg = 0.0;    // theta_s +/- offset, wrapped to [0, 360)
  double measured_deg = 0.0;  // argmin |B| within the window
  double depth_db = 0.0;      // 20 log10 of that minimum
};

struct OfflineScore {
  double mainlobe_deg = 0.0;
  double mainlobe_error_deg = 0.0;
  std::vector<OfflineNull> nulls;
};

OfflineScore score_offline_pattern(const MeasuredSteeringSet& set, const std::vector<Complex>& pattern,
                                   double theta_s, const std::vector<double>& null_offsets, double window_deg = 5.0);

// y = d(theta_s) x + v with v complex circular white noise of power
// 10^(-snr_db/10) per microphone; snr_db = +inf gives v = 0.
ComplexVector synth_snapshot(const ArrayGeometry& geom, const MicrophoneMismatch& mismatch, double k, double theta_s,
                             double snr_db, Complex x, Rng& rng);

// Output-over-input SNR improvement measured over `trials` random snapshots
// with unit-power complex Gaussian signals, in dB.
double monte_carlo_array_gain_db(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s,
                                 double snr_db, int trials, std::uint64_t seed);

// theta_deg,mic_index,re,im (mic_index zero-based).
void write_measured_set_csv(std::ostream& out, const MeasuredSteeringSet& set);
MeasuredSteeringSet read_measured_set_csv(std::istream& in, double frequency_hz);

// theta_deg,magnitude_db,phase_deg
void write_offline_pattern_csv(std::ostream& out, const MeasuredSteeringSet& set, const std::vector<Complex>& pattern);

}  // namespace diffbeam
