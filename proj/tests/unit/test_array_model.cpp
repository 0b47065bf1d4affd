#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "diffbeam/array_model.hpp"
#include "diffbeam/error.hpp"

using namespace diffbeam;
using Catch::Approx;

TEST_CASE("microphone presets map to their directivity coefficients") {
  CHECK(directivity_coefficient(MicrophoneType::Omni) == 1.0);
  CHECK(directivity_coefficient(MicrophoneType::Bidirectional) == 0.0);
  CHECK(directivity_coefficient(MicrophoneType::Cardioid) == 0.5);
  CHECK(directivity_coefficient(MicrophoneType::Hypercardioid) == 1.0 / 3.0);
  CHECK(directivity_coefficient(MicrophoneType::Supercardioid) == std::sqrt(2.0) - 1.0);
  CHECK(parse_microphone_type("supercardioid") == MicrophoneType::Supercardioid);
  CHECK_FALSE(parse_microphone_type("shotgun").has_value());
}

TEST_CASE("directivity gain") {
  CHECK(directivity_gain({0.0, 1.0}, 0.3) == 1.0);
  CHECK(directivity_gain({0.0, 1.0}, -2.0) == 1.0);
  CHECK(directivity_gain({0.0, 0.0}, kPi / 2) == 1.0);
  CHECK(directivity_gain({0.0, 0.5}, -kPi / 2) == Approx(0.0).margin(1e-15));

  SECTION("periodic and symmetric about the look direction") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    std::uniform_real_distribution<double> a(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const MicrophoneElement e{0.0, a(rng)};
      const double phi = u(rng);
      CHECK(directivity_gain(e, phi + 2 * kPi) == Approx(directivity_gain(e, phi)).margin(1e-12));
      CHECK(directivity_gain(e, kPi / 2 + phi) == Approx(directivity_gain(e, kPi / 2 - phi)).margin(1e-12));
      CHECK(directivity_gain(e, phi) >= 2 * e.directivity_a - 1 - 1e-15);
      CHECK(directivity_gain(e, phi) <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("uniform array is centred with equal spacing") {
  for (int m : {1, 2, 5, 11, 12}) {
    const auto geom = ArrayGeometry::alternating(m, 0.013, 0.0);
    const RealVector x = geom.positions();
    CHECK(std::abs(x.sum()) <= 1e-12);
    for (int i = 1; i < m; ++i) CHECK(std::abs(x(i) - x(i - 1) - 0.013) <= 1e-12);
    // x_m = -(M+1) delta / 2 + m delta
    CHECK(x(0) == Approx(-(m + 1) * 0.013 / 2 + 0.013).margin(1e-15));
  }
  const auto geom = ArrayGeometry::alternating(11, 0.01, 0.0);
  CHECK(geom.directivities()(0) == 1.0);
  CHECK(geom.directivities()(1) == 0.0);
  CHECK(geom.uniform_spacing().value() == Approx(0.01));
}

TEST_CASE("array construction rejects invalid elements") {
  CHECK_THROWS_AS(ArrayGeometry(std::vector<MicrophoneElement>{}), Error);
  CHECK_THROWS_AS(ArrayGeometry({{0.0, 1.0}, {0.0, 1.0}}), Error);
  CHECK_THROWS_AS(ArrayGeometry({{0.0, 1.0}, {0.01, 1.5}}), Error);
  CHECK_THROWS_AS(ArrayGeometry({{0.0, -0.1}}), Error);
  CHECK_THROWS_AS(ArrayGeometry::uniform(0.0, std::vector<double>{1.0, 1.0}), Error);
}

TEST_CASE("steering vector") {
  SECTION("zero wavenumber gives unit entries at broadside") {
    for (double a : {1.0, 0.0}) {
      const auto geom = ArrayGeometry::alternating(7, 0.01, a);
      const auto d = steering_vector(geom, 0.0, kPi / 2);
      for (Eigen::Index m = 0; m < d.size(); ++m) {
        CHECK(d(m).real() == Approx(1.0));
        CHECK(d(m).imag() == Approx(0.0).margin(1e-15));
      }
    }
  }

  SECTION("endfire phases of a three-element omni array") {
    const std::vector<double> omni(3, 1.0);
    const auto geom = ArrayGeometry::uniform(0.01, omni);
    const double k = wavenumber(1000.0, 340.0);
    CHECK(k == Approx(18.47995678582231).epsilon(1e-14));
    const auto d = steering_vector(geom, k, 0.0);
    CHECK(std::arg(d(0)) == Approx(-k * 0.01).epsilon(1e-12));
    CHECK(std::arg(d(1)) == Approx(0.0).margin(1e-15));
    CHECK(std::arg(d(2)) == Approx(k * 0.01).epsilon(1e-12));
  }

  SECTION("magnitudes equal |g_m| and mirrored omni elements are conjugate") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> theta(0.0, 2 * kPi);
    const auto geom = ArrayGeometry::alternating(9, 0.017, 1.0 / 3.0);
    const auto omni = ArrayGeometry::alternating(8, 0.017, 1.0);
    for (int i = 0; i < 50; ++i) {
      const double t = theta(rng);
      const auto d = steering_vector(geom, 57.0, t);
      for (std::size_t m = 0; m < geom.size(); ++m) {
        CHECK(std::abs(d(static_cast<Eigen::Index>(m))) == Approx(std::abs(directivity_gain(geom[m], t))).margin(1e-14));
      }
      const auto o = steering_vector(omni, 57.0, t);
      for (Eigen::Index m = 0; m < 4; ++m) {
        CHECK(std::abs(o(m) - std::conj(o(7 - m))) <= 1e-12);
      }
    }
  }
}
