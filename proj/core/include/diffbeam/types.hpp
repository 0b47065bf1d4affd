#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace diffbeam {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDefaultSpeedOfSound = 340.0;  // m/s

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

// k = 2*pi*f/c in rad/m.
constexpr double wavenumber(double frequency_hz, double speed_of_sound = kDefaultSpeedOfSound) noexcept {
  return 2.0 * kPi * frequency_hz / speed_of_sound;
}

// Power ratio to dB.
double to_db(double ratio) noexcept;

}  // namespace diffbeam
