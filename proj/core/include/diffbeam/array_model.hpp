#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "diffbeam/types.hpp"

namespace diffbeam {

// First-order microphone families. The directivity coefficient a gives the
// pattern a + (1 - a) sin(theta) for a look direction of 90 degrees.
enum class MicrophoneType { Omni, Bidirectional, Cardioid, Hypercardioid, Supercardioid };

double directivity_coefficient(MicrophoneType type) noexcept;
std::optional<MicrophoneType> parse_microphone_type(std::string_view name) noexcept;
std::string_view to_string(MicrophoneType type) noexcept;

struct MicrophoneElement {
  double position_x = 0.0;      // m, signed along the array axis
  double directivity_a = 1.0;   // in [0, 1]
};

/// Line array of omnidirectional and first-order directional microphones.
///
/// All elements look along +y (alpha = pi/2). Positions must be strictly
/// increasing; the uniform() constructor centres the array at the origin with
/// x_m = -(M + 1) delta / 2 + m delta for m = 1..M.
class ArrayGeometry {
 public:
  explicit ArrayGeometry(std::vector<MicrophoneElement> elements);

  static ArrayGeometry uniform(double spacing_m, std::span<const double> directivities);
  static ArrayGeometry uniform(double spacing_m, std::span<const MicrophoneType> types);

  // M elements alternating omni / `directional`, starting and ending with omni
  // when M is odd.
  static ArrayGeometry alternating(int count, double spacing_m, double directional_a);

  std::size_t size() const noexcept { return elements_.size(); }
  const MicrophoneElement& operator[](std::size_t m) const { return elements_[m]; }
  const std::vector<MicrophoneElement>& elements() const noexcept { return elements_; }

  RealVector positions() const;
  RealVector directivities() const;

  // Common inter-element spacing, or nullopt if the array is not uniform.
  std::optional<double> uniform_spacing(double tol = 1e-12) const;

  static constexpr double look_direction_alpha = kPi / 2.0;

 private:
  std::vector<MicrophoneElement> elements_;
};

// g(theta) = a + (1 - a) sin(theta).
double directivity_gain(const MicrophoneElement& element, double theta) noexcept;

// Element m is g_m(theta) exp(j k x_m cos(theta)).
ComplexVector steering_vector(const ArrayGeometry& geom, double k, double theta);

}  // namespace diffbeam
