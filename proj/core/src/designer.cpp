#include "diffbeam/designer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "diffbeam/error.hpp"
#include "diffbeam/metrics.hpp"

namespace diffbeam {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_angle(double theta) noexcept {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return t;
}

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  throw Error(ErrorCode::ConfigInvalid, field + ": " + message);
}

}  // namespace

std::vector<double> make_frequency_grid(const FrequencyGrid& grid) {
  if (grid.count < 1) config_error("frequencies.count", "must be >= 1");
  if (!(grid.min_hz > 0.0) || !std::isfinite(grid.max_hz)) config_error("frequencies.min_hz", "must be > 0");
  if (grid.count > 1 && !(grid.max_hz > grid.min_hz)) config_error("frequencies.max_hz", "must exceed min_hz");
  std::vector<double> f(static_cast<std::size_t>(grid.count));
  if (grid.count == 1) {
    f[0] = grid.min_hz;
    return f;
  }
  const double last = grid.count - 1;
  for (int i = 0; i < grid.count; ++i) {
    const double t = i / last;
    f[static_cast<std::size_t>(i)] = grid.spacing == FrequencySpacing::Log
                                         ? grid.min_hz * std::pow(grid.max_hz / grid.min_hz, t)
                                         : grid.min_hz + t * (grid.max_hz - grid.min_hz);
  }
  f.back() = grid.max_hz;
  return f;
}

void validate(const DesignSpec& spec, const ArrayGeometry& geom) {
  if (spec.order < 0) config_error("order", "must be non-negative");
  if (spec.null_offsets.size() != static_cast<std::size_t>(spec.order)) {
    config_error("nulls_deg", "an order-" + std::to_string(spec.order) + " design needs exactly " +
                                  std::to_string(spec.order) + " null offsets");
  }
  try {
    validate_null_offsets(spec.null_offsets);
  } catch (const Error&) {
    config_error("nulls_deg", "offsets must be distinct, ascending and in (0, 180] degrees");
  }
  if (!std::isfinite(spec.steer_theta_s)) config_error("steer_deg", "must be finite");
  if (!(spec.wng_slack_db >= 0.0) || !std::isfinite(spec.wng_slack_db)) config_error("wng_slack_db", "must be >= 0");
  if (!(spec.speed_of_sound > 0.0) || !std::isfinite(spec.speed_of_sound)) config_error("speed_of_sound", "must be > 0");
  if (spec.freq_grid.empty()) config_error("frequencies", "grid is empty");
  for (std::size_t i = 0; i < spec.freq_grid.size(); ++i) {
    if (!(spec.freq_grid[i] > 0.0) || !std::isfinite(spec.freq_grid[i])) config_error("frequencies", "must be > 0");
    if (i > 0 && !(spec.freq_grid[i] > spec.freq_grid[i - 1])) config_error("frequencies", "must be strictly increasing");
  }
  const bool opposite = !spec.null_offsets.empty() && std::abs(spec.null_offsets.back() - kPi) <= 1e-12;
  const std::size_t required = 2 * spec.null_offsets.size() + 1 - (opposite ? 1 : 0);
  if (geom.size() < required) {
    config_error("array.elements", "need at least " + std::to_string(required) + " microphones for this null set, have " +
                                       std::to_string(geom.size()));
  }
}

double angular_distance(double a, double b) noexcept {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

std::vector<double> null_directions(double theta_s, const std::vector<double>& offsets) {
  std::vector<double> out;
  for (double o : offsets) {
    out.push_back(wrap_angle(theta_s + o));
    if (std::abs(o - kPi) > 1e-12) out.push_back(wrap_angle(theta_s - o));
  }
  return out;
}

double mainlobe_direction(const ComplexVector& h, const ArrayGeometry& geom, double k, double step_deg) {
  const int points = static_cast<int>(std::lround(360.0 / step_deg));
  double best_theta = 0.0;
  double best = -1.0;
  for (int i = 0; i < points; ++i) {
    const double theta = deg_to_rad(i * step_deg);
    const double mag = std::abs(beampattern(h, geom, k, theta));
    if (mag > best) {
      best = mag;
      best_theta = theta;
    }
  }
  return best_theta;
}

double null_depth_db(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta, double window_deg,
                     double step_deg) {
  const int half = static_cast<int>(std::lround(window_deg / step_deg));
  double smallest = std::numeric_limits<double>::infinity();
  for (int i = -half; i <= half; ++i) {
    smallest = std::min(smallest, std::abs(beampattern(h, geom, k, theta + deg_to_rad(i * step_deg))));
  }
  return 20.0 * std::log10(std::max(smallest, 1e-150));
}

std::pair<BeamformerFilter, MetricsRow> design_at_frequency(const DesignSpec& spec, const ArrayGeometry& geom,
                                                            const IdealPattern& pattern, double frequency_hz) {
  const double k = wavenumber(frequency_hz, spec.speed_of_sound);
  const auto cs = build_constraints(geom, k, spec.steer_theta_s, spec.null_offsets);
  const double w_max = wmax_db(cs);
  const double zeta = w_max - spec.wng_slack_db;

  const auto gamma = gamma_matrix(geom, k);
  const ComplexVector q = pattern_coupling_vector(geom, k, pattern);
  const double xi = pattern_energy(pattern.coeffs());

  BeamformerFilter filter;
  switch (spec.method) {
    case DesignMethod::NC: filter = solve_nc(cs); break;
    case DesignMethod::MWNG: filter = solve_mwng(cs); break;
    case DesignMethod::INC: filter = solve_inc(cs, gamma, q, spec.wng_slack_db); break;
  }
  filter.frequency_hz = frequency_hz;
  if (!filter.zeta_wng_db) filter.zeta_wng_db = zeta;

  const ComplexVector& h = filter.weights;
  MetricsRow row;
  row.frequency_hz = frequency_hz;
  row.df_db = to_db(directivity_factor(h, steering_vector(geom, k, spec.steer_theta_s), gamma));
  row.wng_db = white_noise_gain_db(h, geom, k, spec.steer_theta_s);
  row.mse_db = mse_to_db(mse_quadratic(h, gamma, q, xi));
  row.wmax_db = w_max;
  row.zeta_wng_db = zeta;
  row.mainlobe_theta = mainlobe_direction(h, geom, k);
  row.null_angles = null_directions(spec.steer_theta_s, spec.null_offsets);
  for (double theta : row.null_angles) row.null_depths_db.push_back(null_depth_db(h, geom, k, theta));
  return {std::move(filter), std::move(row)};
}

BroadbandDesign design_broadband(const DesignSpec& spec, const ArrayGeometry& geom, const DesignOptions& options) {
  validate(spec, geom);
  IdealPattern pattern = [&] {
    try {
      return solve_coefficients(spec.steer_theta_s, spec.null_offsets, spec.order);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigInvalid, std::string("nulls_deg: ") + e.what());
    }
  }();

  const std::size_t count = spec.freq_grid.size();
  BroadbandDesign out{std::vector<std::optional<BeamformerFilter>>(count),
                      MetricsReport{spec, geom, pattern, std::vector<MetricsRow>(count)}};

  auto run_one = [&](std::size_t i) {
    const double f = spec.freq_grid[i];
    try {
      auto [filter, row] = design_at_frequency(spec, geom, pattern, f);
      out.filters[i] = std::move(filter);
      out.report.rows[i] = std::move(row);
    } catch (const Error& e) {
      MetricsRow row;
      row.frequency_hz = f;
      row.df_db = row.wng_db = row.mse_db = row.wmax_db = row.zeta_wng_db = std::numeric_limits<double>::quiet_NaN();
      row.mainlobe_theta = std::numeric_limits<double>::quiet_NaN();
      row.status = std::string(to_string(e.code()));
      out.report.rows[i] = std::move(row);
    }
  };

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) run_one(i);
  } else {
    // Each slot is written by exactly one worker, so the result is independent
    // of scheduling.
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) run_one(i);
      });
    }
  }

  const bool any_ok = std::any_of(out.report.rows.begin(), out.report.rows.end(), [](const MetricsRow& r) { return r.ok(); });
  if (!any_ok) {
    throw Error(ErrorCode::DesignFailed, "every frequency failed; first status: " + out.report.rows.front().status);
  }
  return out;
}

}  // namespace diffbeam
