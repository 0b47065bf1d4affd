#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "diffbeam/designer.hpp"
#include "diffbeam/error.hpp"
#include "diffbeam/eval_harness.hpp"
#include "diffbeam/metrics.hpp"

using namespace diffbeam;
using Catch::Approx;

namespace {

struct Fixture {
  ArrayGeometry geom = ArrayGeometry::alternating(11, 0.02, 0.0);
  DesignSpec spec = [] {
    DesignSpec s;
    s.order = 2;
    s.steer_theta_s = deg_to_rad(60.0);
    s.null_offsets = {kPi / 2, kPi};
    return s;
  }();
  IdealPattern pattern = solve_coefficients(spec.steer_theta_s, spec.null_offsets, spec.order);
};

}  // namespace

TEST_CASE("measurement grid") {
  const auto grid = measurement_angles_deg();
  REQUIRE(grid.size() == 73);
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 360.0);
  CHECK(measurement_angles_deg(1.0).size() == 361);
  CHECK_THROWS_AS(measurement_angles_deg(0.0), Error);
}

TEST_CASE("zero perturbation reproduces the analytic model") {
  Fixture fx;
  const PerturbationModel none;
  CHECK(none.is_zero());
  const auto set = synth_steering_set(fx.geom, 1000.0, none);
  const double k = wavenumber(1000.0);
  for (std::size_t i = 0; i < set.angles_deg.size(); ++i) {
    const ComplexVector d = steering_vector(fx.geom, k, deg_to_rad(set.angles_deg[i]));
    CHECK((set.vectors[i] - d).cwiseAbs().maxCoeff() <= 1e-12);
  }

  const auto [filter, row] = design_at_frequency(fx.spec, fx.geom, fx.pattern, 1000.0);
  const auto pattern = offline_beampattern(set, filter.weights);
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    CHECK(std::abs(pattern[i] - beampattern(filter.weights, fx.geom, k, deg_to_rad(set.angles_deg[i]))) <= 1e-12);
  }
  const auto score = score_offline_pattern(set, pattern, fx.spec.steer_theta_s, fx.spec.null_offsets);
  CHECK(score.mainlobe_error_deg == 0.0);
  CHECK(score.mainlobe_deg == Approx(60.0));
  REQUIRE(score.nulls.size() == 3);
  for (const auto& n : score.nulls) CHECK(n.depth_db <= -60.0);
  CHECK_THROWS_AS(offline_beampattern(set, ComplexVector::Ones(3)), Error);
}

TEST_CASE("perturbed sets are deterministic per seed and stay close to the ideal") {
  Fixture fx;
  PerturbationModel model;
  model.gain_sigma_db = 0.5;
  model.phase_sigma_deg = 2.0;
  model.position_sigma_m = 0.0002;
  model.seed = 7;
  const auto a = synth_steering_set(fx.geom, 2000.0, model);
  const auto b = synth_steering_set(fx.geom, 2000.0, model);
  for (std::size_t i = 0; i < a.vectors.size(); ++i) CHECK(a.vectors[i] == b.vectors[i]);
  model.seed = 8;
  const auto c = synth_steering_set(fx.geom, 2000.0, model);
  CHECK(a.vectors[3] != c.vectors[3]);

  const auto [filter, row] = design_at_frequency(fx.spec, fx.geom, fx.pattern, 2000.0);
  const auto score = score_offline_pattern(a, offline_beampattern(a, filter.weights), fx.spec.steer_theta_s,
                                           fx.spec.null_offsets);
  CHECK(score.mainlobe_error_deg <= 5.0);
  for (const auto& n : score.nulls) CHECK(n.depth_db <= -20.0);

  PerturbationModel bad;
  bad.gain_sigma_db = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("perturbation config parsing") {
  const auto m = parse_perturbation_config(R"({"perturbation": {"gain_sigma_db": 0.5, "seed": 3}})");
  CHECK(m.gain_sigma_db == 0.5);
  CHECK(m.seed == 3);
  CHECK(parse_perturbation_config("{}").is_zero());
  CHECK_THROWS_AS(parse_perturbation_config(R"({"perturbation": {"gain": 1}})"), Error);
}

TEST_CASE("snapshots") {
  Fixture fx;
  Rng rng(1);
  const auto ideal = no_mismatch(fx.geom);
  const double k = wavenumber(1500.0);
  const ComplexVector clean =
      synth_snapshot(fx.geom, ideal, k, 0.4, std::numeric_limits<double>::infinity(), Complex(0.3, -0.2), rng);
  CHECK((clean - steering_vector(fx.geom, k, 0.4) * Complex(0.3, -0.2)).cwiseAbs().maxCoeff() == 0.0);

  const std::vector<double> omni(4, 1.0);
  const auto o = ArrayGeometry::uniform(0.01, omni);
  const ComplexVector y = synth_snapshot(o, no_mismatch(o), 0.0, 1.0, 20.0, Complex(1.0, 0.0), rng);
  CHECK(y.size() == 4);
  CHECK((y - ComplexVector::Ones(4)).cwiseAbs().maxCoeff() < 0.5);
  CHECK_THROWS_AS(synth_snapshot(o, no_mismatch(o), 0.0, 1.0, std::nan(""), Complex(1.0, 0.0), rng), Error);
}

TEST_CASE("Monte-Carlo array gain converges to the white noise gain") {
  Fixture fx;
  const auto [filter, row] = design_at_frequency(fx.spec, fx.geom, fx.pattern, 1000.0);
  const double k = wavenumber(1000.0);
  const double analytic = white_noise_gain_db(filter.weights, fx.geom, k, fx.spec.steer_theta_s);
  int within = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const double mc = monte_carlo_array_gain_db(filter.weights, fx.geom, k, fx.spec.steer_theta_s, 0.0, 10000, seed);
    if (std::abs(mc - analytic) <= 0.5) ++within;
  }
  CHECK(within >= 19);
}

TEST_CASE("measured set CSV round trip") {
  Fixture fx;
  PerturbationModel model;
  model.phase_sigma_deg = 3.0;
  model.seed = 99;
  const auto set = synth_steering_set(fx.geom, 800.0, model);
  std::stringstream ss;
  write_measured_set_csv(ss, set);
  const auto back = read_measured_set_csv(ss, 800.0);
  REQUIRE(back.angles_deg.size() == set.angles_deg.size());
  REQUIRE(back.mics() == set.mics());
  for (std::size_t i = 0; i < set.vectors.size(); ++i) {
    CHECK(back.angles_deg[i] == Approx(set.angles_deg[i]));
    CHECK((back.vectors[i] - set.vectors[i]).cwiseAbs().maxCoeff() <= 1e-11);
  }

  std::istringstream bad("angle,mic\n");
  CHECK_THROWS_AS(read_measured_set_csv(bad, 800.0), Error);
  std::istringstream missing("theta_deg,mic_index,re,im\n0,0,1,0\n0,2,1,0\n");
  CHECK_THROWS_AS(read_measured_set_csv(missing, 800.0), Error);
}
