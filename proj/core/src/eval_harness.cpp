#include "diffbeam/eval_harness.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "diffbeam/designer.hpp"
#include "diffbeam/error.hpp"
#include "diffbeam/report_io.hpp"

namespace diffbeam {
namespace {

double magnitude_db(Complex v) { return 20.0 * std::log10(std::max(std::abs(v), 1e-15)); }

double wrap_deg(double deg) {
  double d = std::fmod(deg, 360.0);
  if (d < 0.0) d += 360.0;
  return d;
}

double angle_distance_deg(double a, double b) {
  const double d = wrap_deg(a - b);
  // Snap degree round-off from radian conversions to the grid.
  return std::round(std::min(d, 360.0 - d) * 1e9) / 1e9;
}

// Circular complex Gaussian with E|n|^2 = power.
Complex complex_noise(Rng& rng, double power) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5 * power));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

}  // namespace

void PerturbationModel::validate() const {
  if (!(gain_sigma_db >= 0.0) || !(phase_sigma_deg >= 0.0) || !(position_sigma_m >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "perturbation sigmas must be non-negative");
  }
  if (sensor_noise_db && !std::isfinite(*sensor_noise_db)) {
    throw Error(ErrorCode::InvalidArgument, "sensor noise level must be finite");
  }
}

bool PerturbationModel::is_zero() const noexcept {
  return gain_sigma_db == 0.0 && phase_sigma_deg == 0.0 && position_sigma_m == 0.0 && !sensor_noise_db;
}

PerturbationModel parse_perturbation_config(const std::string& document) {
  using nlohmann::json;
  PerturbationModel model;
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("document: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("perturbation")) return model;
  const auto& p = doc.at("perturbation");
  if (!p.is_object()) throw Error(ErrorCode::ConfigInvalid, "perturbation: expected an object");
  const auto number = [&](const char* key) {
    const auto& v = p.at(key);
    if (!v.is_number()) throw Error(ErrorCode::ConfigInvalid, std::string("perturbation.") + key + ": expected a number");
    return v.get<double>();
  };
  for (const auto& [key, value] : p.items()) {
    if (key == "gain_sigma_db") {
      model.gain_sigma_db = number("gain_sigma_db");
    } else if (key == "phase_sigma_deg") {
      model.phase_sigma_deg = number("phase_sigma_deg");
    } else if (key == "position_sigma_m") {
      model.position_sigma_m = number("position_sigma_m");
    } else if (key == "sensor_noise_db") {
      if (!value.is_null()) model.sensor_noise_db = number("sensor_noise_db");
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw Error(ErrorCode::ConfigInvalid, "perturbation.seed: expected a non-negative integer");
      model.seed = value.get<std::uint64_t>();
    } else {
      throw Error(ErrorCode::ConfigInvalid, "perturbation." + key + ": unknown field");
    }
  }
  try {
    model.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("perturbation: ") + e.what());
  }
  return model;
}

MicrophoneMismatch no_mismatch(const ArrayGeometry& geom) {
  MicrophoneMismatch out;
  out.factors.assign(geom.size(), Complex(1.0, 0.0));
  for (const auto& e : geom.elements()) out.positions.push_back(e.position_x);
  return out;
}

MicrophoneMismatch draw_mismatch(const PerturbationModel& model, const ArrayGeometry& geom, Rng& rng) {
  model.validate();
  auto out = no_mismatch(geom);
  std::normal_distribution<double> standard(0.0, 1.0);
  for (std::size_t m = 0; m < geom.size(); ++m) {
    // Always draw all three so the stream layout does not depend on which sigmas are zero.
    const double gain_db = model.gain_sigma_db * standard(rng);
    const double phase_deg = model.phase_sigma_deg * standard(rng);
    const double shift_m = model.position_sigma_m * standard(rng);
    out.factors[m] = std::polar(std::pow(10.0, gain_db / 20.0), deg_to_rad(phase_deg));
    out.positions[m] += shift_m;
  }
  return out;
}

ComplexVector mismatched_steering_vector(const ArrayGeometry& geom, const MicrophoneMismatch& mismatch, double k,
                                         double theta) {
  if (mismatch.factors.size() != geom.size() || mismatch.positions.size() != geom.size()) {
    throw Error(ErrorCode::DimensionMismatch, "mismatch realisation does not match the array");
  }
  const double c = std::cos(theta);
  ComplexVector d(static_cast<Eigen::Index>(geom.size()));
  for (std::size_t m = 0; m < geom.size(); ++m) {
    d(static_cast<Eigen::Index>(m)) =
        mismatch.factors[m] * directivity_gain(geom[m], theta) * std::polar(1.0, k * mismatch.positions[m] * c);
  }
  return d;
}

std::vector<double> measurement_angles_deg(double step_deg) {
  if (!(step_deg > 0.0)) throw Error(ErrorCode::InvalidArgument, "angle step must be positive");
  const int steps = static_cast<int>(std::lround(360.0 / step_deg));
  std::vector<double> angles;
  for (int i = 0; i <= steps; ++i) angles.push_back(i * step_deg);
  angles.back() = 360.0;
  return angles;
}

MeasuredSteeringSet synth_steering_set(const ArrayGeometry& geom, double frequency_hz, const PerturbationModel& perturb,
                                       double speed_of_sound, double step_deg) {
  Rng rng(perturb.seed);
  const auto mismatch = draw_mismatch(perturb, geom, rng);
  const double k = wavenumber(frequency_hz, speed_of_sound);

  MeasuredSteeringSet set;
  set.frequency_hz = frequency_hz;
  set.angles_deg = measurement_angles_deg(step_deg);
  for (double deg : set.angles_deg) {
    ComplexVector v = perturb.is_zero() ? steering_vector(geom, k, deg_to_rad(deg))
                                        : mismatched_steering_vector(geom, mismatch, k, deg_to_rad(deg));
    if (perturb.sensor_noise_db) {
      const double power = std::pow(10.0, *perturb.sensor_noise_db / 10.0);
      for (Eigen::Index m = 0; m < v.size(); ++m) v(m) += complex_noise(rng, power);
    }
    set.vectors.push_back(std::move(v));
  }
  return set;
}

std::vector<Complex> offline_beampattern(const MeasuredSteeringSet& set, const ComplexVector& h) {
  std::vector<Complex> out;
  out.reserve(set.vectors.size());
  for (const auto& v : set.vectors) {
    if (v.size() != h.size()) {
      throw Error(ErrorCode::DimensionMismatch, "filter length does not match the measured vectors");
    }
    out.push_back(h.dot(v));
  }
  return out;
}

OfflineScore score_offline_pattern(const MeasuredSteeringSet& set, const std::vector<Complex>& pattern,
                                   double theta_s, const std::vector<double>& null_offsets, double window_deg) {
  if (pattern.size() != set.angles_deg.size() || pattern.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "pattern does not match the measurement grid");
  }
  OfflineScore score;
  std::size_t best = 0;
  for (std::size_t i = 1; i < pattern.size(); ++i) {
    if (std::abs(pattern[i]) > std::abs(pattern[best])) best = i;
  }
  score.mainlobe_deg = wrap_deg(set.angles_deg[best]);
  score.mainlobe_error_deg = angle_distance_deg(score.mainlobe_deg, rad_to_deg(theta_s));

  for (double direction : null_directions(theta_s, null_offsets)) {
    OfflineNull n;
    n.target_deg = wrap_deg(rad_to_deg(direction));
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      if (angle_distance_deg(set.angles_deg[i], n.target_deg) > window_deg + 1e-9) continue;
      const double mag = std::abs(pattern[i]);
      if (mag < smallest) {
        smallest = mag;
        n.measured_deg = wrap_deg(set.angles_deg[i]);
      }
    }
    if (!std::isfinite(smallest)) throw Error(ErrorCode::InvalidArgument, "no grid angle inside the null window");
    n.depth_db = magnitude_db(smallest);
    score.nulls.push_back(n);
  }
  return score;
}

ComplexVector synth_snapshot(const ArrayGeometry& geom, const MicrophoneMismatch& mismatch, double k, double theta_s,
                             double snr_db, Complex x, Rng& rng) {
  if (std::isnan(snr_db)) throw Error(ErrorCode::InvalidArgument, "SNR must not be NaN");
  ComplexVector y = mismatched_steering_vector(geom, mismatch, k, theta_s) * x;
  if (std::isinf(snr_db) && snr_db > 0.0) return y;
  const double power = std::pow(10.0, -snr_db / 10.0);
  for (Eigen::Index m = 0; m < y.size(); ++m) y(m) += complex_noise(rng, power);
  return y;
}

double monte_carlo_array_gain_db(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s,
                                 double snr_db, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trial");
  if (static_cast<std::size_t>(h.size()) != geom.size()) {
    throw Error(ErrorCode::DimensionMismatch, "filter length does not match the array");
  }
  Rng rng(seed);
  const auto ideal = no_mismatch(geom);
  const Complex response = h.dot(steering_vector(geom, k, theta_s));
  double in_signal = 0.0;
  double in_noise = 0.0;
  double out_signal = 0.0;
  double out_noise = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Complex x = complex_noise(rng, 1.0);
    const ComplexVector y = synth_snapshot(geom, ideal, k, theta_s, snr_db, x, rng);
    const ComplexVector clean = steering_vector(geom, k, theta_s) * x;
    const Complex z = h.dot(y);
    in_signal += std::norm(x);
    in_noise += (y - clean).squaredNorm() / static_cast<double>(y.size());
    out_signal += std::norm(response * x);
    out_noise += std::norm(z - response * x);
  }
  return to_db((out_signal / out_noise) / (in_signal / in_noise));
}

void write_measured_set_csv(std::ostream& out, const MeasuredSteeringSet& set) {
  out << "theta_deg,mic_index,re,im\n";
  for (std::size_t i = 0; i < set.angles_deg.size(); ++i) {
    for (Eigen::Index m = 0; m < set.vectors[i].size(); ++m) {
      out << format_number(set.angles_deg[i], 3) << ',' << m << ',' << format_number(set.vectors[i](m).real(), 12) << ','
          << format_number(set.vectors[i](m).imag(), 12) << '\n';
    }
  }
}

MeasuredSteeringSet read_measured_set_csv(std::istream& in, double frequency_hz) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "measured set: empty input");
  if (line.rfind("theta_deg,mic_index,re,im", 0) != 0) {
    throw Error(ErrorCode::IoError, "measured set: expected header theta_deg,mic_index,re,im");
  }
  std::map<double, std::map<long, Complex>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::istringstream ss(line);
    double theta = 0.0;
    long mic = 0;
    double re = 0.0;
    double im = 0.0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> theta >> c1 >> mic >> c2 >> re >> c3 >> im) || c1 != ',' || c2 != ',' || c3 != ',' || mic < 0) {
      throw Error(ErrorCode::IoError, "measured set: malformed line " + std::to_string(line_no));
    }
    if (!rows[theta].emplace(mic, Complex(re, im)).second) {
      throw Error(ErrorCode::IoError, "measured set: duplicate entry on line " + std::to_string(line_no));
    }
  }
  if (rows.empty()) throw Error(ErrorCode::IoError, "measured set: no data rows");

  MeasuredSteeringSet set;
  set.frequency_hz = frequency_hz;
  const std::size_t mics = rows.begin()->second.size();
  for (const auto& [theta, entries] : rows) {
    if (entries.size() != mics || entries.rbegin()->first != static_cast<long>(mics) - 1) {
      throw Error(ErrorCode::IoError, "measured set: angle " + format_number(theta, 3) +
                                          " does not list microphones 0.." + std::to_string(mics - 1));
    }
    ComplexVector v(static_cast<Eigen::Index>(mics));
    for (const auto& [m, value] : entries) v(m) = value;
    set.angles_deg.push_back(theta);
    set.vectors.push_back(std::move(v));
  }
  return set;
}

void write_offline_pattern_csv(std::ostream& out, const MeasuredSteeringSet& set, const std::vector<Complex>& pattern) {
  out << "theta_deg,magnitude_db,phase_deg\n";
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    out << format_number(set.angles_deg[i], 3) << ',' << format_number(magnitude_db(pattern[i]), 6) << ','
        << format_number(rad_to_deg(std::arg(pattern[i])), 6) << '\n';
  }
}

}  // namespace diffbeam
