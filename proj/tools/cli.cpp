#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "diffbeam/error.hpp"
#include "diffbeam/eval_harness.hpp"
#include "diffbeam/report_io.hpp"

namespace diffbeam::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidNulls:
    case ErrorCode::InvalidCoefficients:
    case ErrorCode::TooFewMicrophones:
    case ErrorCode::InvalidArgument:
      return kExitConfigInvalid;
    case ErrorCode::DesignFailed:
      return kExitDesignFailed;
    default:
      return kExitFailure;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigInvalid, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path prepare_output_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw Error(ErrorCode::IoError, dir + ": output directory is not writable");
  return p;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, path.string() + ": cannot write");
  return out;
}

std::string frequency_tag(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%gHz", f);
  return buf;
}

void apply_overrides(DesignConfig& cfg, const Overrides& o) {
  auto& spec = cfg.spec;
  if (o.steer_deg) spec.steer_theta_s = deg_to_rad(*o.steer_deg);
  if (o.wng_slack_db) spec.wng_slack_db = *o.wng_slack_db;
  if (o.method) {
    const auto m = parse_design_method(*o.method);
    if (!m || *m == DesignMethod::MWNG) throw Error(ErrorCode::ConfigInvalid, "--method: expected inc or nc");
    spec.method = *m;
  }
  if (o.fmin_hz || o.fmax_hz || o.fcount) {
    FrequencyGrid grid;
    grid.min_hz = o.fmin_hz.value_or(spec.freq_grid.front());
    grid.max_hz = o.fmax_hz.value_or(spec.freq_grid.back());
    grid.count = o.fcount.value_or(static_cast<int>(spec.freq_grid.size()));
    spec.freq_grid = make_frequency_grid(grid);
  }
  validate(spec, cfg.geometry);
}

DesignOptions design_options(const CliInvocation& inv) { return DesignOptions{inv.threads}; }

void write_design_outputs(const fs::path& dir, const BroadbandDesign& design) {
  {
    auto out = open_output(dir / "filters.json");
    write_filters_json(out, design);
  }
  {
    auto out = open_output(dir / "metrics.csv");
    write_metrics_csv(out, design.report);
  }
  {
    auto out = open_output(dir / "report.json");
    write_report_json(out, design.report);
  }
  {
    auto out = open_output(dir / "beampattern.csv");
    write_beampattern_grid_csv(out, design);
  }
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "diffbeam: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "diffbeam: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

unsigned threads_from_env() {
  const char* value = std::getenv("DIFFBEAM_THREADS");
  if (!value || !*value) return 0;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (*end != '\0' || n < 0) return 0;
  return static_cast<unsigned>(n);
}

DesignConfig load_config_with_overrides(const CliInvocation& inv) {
  if (inv.config_path.empty()) throw Error(ErrorCode::ConfigInvalid, "--config is required");
  auto cfg = parse_design_config(read_file(inv.config_path));
  apply_overrides(cfg, inv.overrides);
  return cfg;
}

int run_design(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_config_with_overrides(inv);
    const auto dir = prepare_output_dir(inv.output_dir);
    const auto design = design_broadband(cfg.spec, cfg.geometry, design_options(inv));
    write_design_outputs(dir, design);

    std::size_t failed = 0;
    double worst_mse = -std::numeric_limits<double>::infinity();
    for (const auto& r : design.report.rows) {
      if (!r.ok()) {
        ++failed;
        err << "diffbeam: " << format_number(r.frequency_hz, 3) << " Hz failed: " << r.status << '\n';
        continue;
      }
      worst_mse = std::max(worst_mse, r.mse_db);
    }
    out << to_string(cfg.spec.method) << " design: " << design.report.rows.size() << " frequencies, " << failed
        << " failed, worst MSE " << format_number(worst_mse, 2) << " dB, ideal DF "
        << format_number(ideal_directivity_factor_db(design.report.pattern), 2) << " dB\n";
    out << "wrote " << (dir / "filters.json").string() << ", metrics.csv, report.json, beampattern.csv\n";
    return kExitOk;
  });
}

int run_evaluate(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto cfg = load_config_with_overrides(inv);
    const std::string document = read_file(inv.config_path);
    auto perturb = parse_perturbation_config(document);
    if (inv.seed) perturb.seed = *inv.seed;
    const auto dir = prepare_output_dir(inv.output_dir);

    // Filters: either from a previous design run or designed here.
    std::vector<FilterRecord> filters;
    if (!inv.filters_path.empty()) {
      std::ifstream in(inv.filters_path);
      if (!in) throw Error(ErrorCode::ConfigInvalid, inv.filters_path + ": cannot open filters file");
      filters = read_filters_json(in);
    } else {
      if (!inv.eval_frequencies_hz.empty()) cfg.spec.freq_grid = inv.eval_frequencies_hz;
      else cfg.spec.freq_grid = {500.0, 1000.0, 2000.0, 3000.0};
      validate(cfg.spec, cfg.geometry);
      filters = filter_records(design_broadband(cfg.spec, cfg.geometry, design_options(inv)));
    }

    std::vector<double> freqs = inv.eval_frequencies_hz;
    if (freqs.empty()) {
      for (const auto& f : filters) freqs.push_back(f.frequency_hz);
    }
    if (!inv.measured_path.empty() && freqs.size() != 1) {
      throw Error(ErrorCode::ConfigInvalid, "--measured needs exactly one --frequency");
    }

    json summary = json::array();
    for (double f : freqs) {
      const auto it = std::find_if(filters.begin(), filters.end(),
                                   [&](const FilterRecord& r) { return std::abs(r.frequency_hz - f) <= 1e-6 * f; });
      if (it == filters.end()) {
        throw Error(ErrorCode::ConfigInvalid, "no filter designed for " + format_number(f, 3) + " Hz");
      }
      if (static_cast<std::size_t>(it->weights.size()) != cfg.geometry.size()) {
        throw Error(ErrorCode::ConfigInvalid, "filter length does not match the configured array");
      }

      MeasuredSteeringSet set;
      if (!inv.measured_path.empty()) {
        std::ifstream in(inv.measured_path);
        if (!in) throw Error(ErrorCode::ConfigInvalid, inv.measured_path + ": cannot open measured set");
        set = read_measured_set_csv(in, f);
      } else {
        set = synth_steering_set(cfg.geometry, f, perturb, cfg.spec.speed_of_sound, inv.grid_step_deg);
      }
      const auto pattern = offline_beampattern(set, it->weights);
      const auto score = score_offline_pattern(set, pattern, cfg.spec.steer_theta_s, cfg.spec.null_offsets);
      {
        auto file = open_output(dir / ("offline_" + frequency_tag(f) + ".csv"));
        write_offline_pattern_csv(file, set, pattern);
      }

      json nulls = json::array();
      out << format_number(f, 1) << " Hz: main lobe " << format_number(score.mainlobe_deg, 1) << " deg (error "
          << format_number(score.mainlobe_error_deg, 1) << " deg); nulls";
      for (const auto& n : score.nulls) {
        nulls.push_back({{"target_deg", n.target_deg}, {"measured_deg", n.measured_deg}, {"depth_db", n.depth_db}});
        out << ' ' << format_number(n.measured_deg, 1) << " deg (" << format_number(n.depth_db, 1) << " dB)";
      }
      out << '\n';
      summary.push_back({{"frequency_hz", f},
                         {"mainlobe_deg", score.mainlobe_deg},
                         {"mainlobe_error_deg", score.mainlobe_error_deg},
                         {"nulls", nulls}});
    }

    json header = {
        {"source", inv.measured_path.empty() ? "synthetic" : inv.measured_path},
        {"generator", "std::mt19937_64"},
        {"distributions", "gain lognormal (normal in dB), phase normal (deg), position normal (m), "
                          "sensor noise complex circular Gaussian"},
        {"gain_sigma_db", perturb.gain_sigma_db},
        {"phase_sigma_deg", perturb.phase_sigma_deg},
        {"position_sigma_m", perturb.position_sigma_m},
        {"sensor_noise_db", perturb.sensor_noise_db ? json(*perturb.sensor_noise_db) : json(nullptr)},
        {"seed", perturb.seed},
    };
    auto file = open_output(dir / "evaluation.json");
    file << json{{"perturbation", header}, {"results", summary}}.dump(2) << '\n';
    return kExitOk;
  });
}

int run_sweep(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto base = load_config_with_overrides(inv);
    if (inv.sweep_values.empty()) throw Error(ErrorCode::ConfigInvalid, "--values: at least one value required");
    const auto dir = prepare_output_dir(inv.output_dir);

    auto combined = open_output(dir / "sweep.csv");
    combined << "param,value,frequency_hz,df_db,wng_db,mse_db,wmax_db,mainlobe_deg,status\n";
    for (const auto& value : inv.sweep_values) {
      DesignConfig cfg = base;
      if (inv.sweep_param == "steer_deg" || inv.sweep_param == "wng_slack_db") {
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0') {
          throw Error(ErrorCode::ConfigInvalid, "--values: '" + value + "' is not a number");
        }
        if (inv.sweep_param == "steer_deg") cfg.spec.steer_theta_s = deg_to_rad(v);
        else cfg.spec.wng_slack_db = v;
      } else if (inv.sweep_param == "element_type") {
        // Replace every directional element, keeping omni positions.
        const auto type = parse_microphone_type(value);
        if (!type) throw Error(ErrorCode::ConfigInvalid, "--values: unknown microphone type '" + value + "'");
        std::vector<MicrophoneElement> elements = cfg.geometry.elements();
        for (auto& e : elements) {
          if (e.directivity_a != 1.0) e.directivity_a = directivity_coefficient(*type);
        }
        cfg.geometry = ArrayGeometry(std::move(elements));
      } else {
        throw Error(ErrorCode::ConfigInvalid, "--param: expected steer_deg, wng_slack_db or element_type");
      }
      validate(cfg.spec, cfg.geometry);

      const auto design = design_broadband(cfg.spec, cfg.geometry, design_options(inv));
      {
        auto file = open_output(dir / ("metrics_" + inv.sweep_param + "_" + value + ".csv"));
        write_metrics_csv(file, design.report);
      }
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& r : design.report.rows) {
        combined << inv.sweep_param << ',' << value << ',' << format_number(r.frequency_hz, 3) << ','
                 << format_number(r.df_db) << ',' << format_number(r.wng_db) << ',' << format_number(r.mse_db) << ','
                 << format_number(r.wmax_db) << ',' << format_number(rad_to_deg(r.mainlobe_theta), 1) << ','
                 << r.status << '\n';
        if (r.ok()) worst = std::max(worst, r.mse_db);
      }
      out << inv.sweep_param << '=' << value << ": worst MSE " << format_number(worst, 2) << " dB\n";
    }
    return kExitOk;
  });
}

int run_nulls(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (inv.coefficients.empty()) throw Error(ErrorCode::InvalidCoefficients, "--coeffs: no coefficients given");
    const auto nulls = nulls_from_coefficients(inv.coefficients);
    for (std::size_t i = 0; i < nulls.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", rad_to_deg(nulls[i]));
      out << (i ? ", " : "") << buf;
    }
    out << '\n';
    return kExitOk;
  });
}

}  // namespace diffbeam::cli
