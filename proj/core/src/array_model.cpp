#include "diffbeam/array_model.hpp"

#include <cmath>
#include <string>

#include "diffbeam/error.hpp"

namespace diffbeam {

double directivity_coefficient(MicrophoneType type) noexcept {
  switch (type) {
    case MicrophoneType::Omni: return 1.0;
    case MicrophoneType::Bidirectional: return 0.0;
    case MicrophoneType::Cardioid: return 0.5;
    case MicrophoneType::Hypercardioid: return 1.0 / 3.0;
    case MicrophoneType::Supercardioid: return std::sqrt(2.0) - 1.0;
  }
  return 1.0;
}

std::optional<MicrophoneType> parse_microphone_type(std::string_view name) noexcept {
  if (name == "omni" || name == "omnidirectional") return MicrophoneType::Omni;
  if (name == "bidirectional" || name == "figure8" || name == "dipole") return MicrophoneType::Bidirectional;
  if (name == "cardioid") return MicrophoneType::Cardioid;
  if (name == "hypercardioid") return MicrophoneType::Hypercardioid;
  if (name == "supercardioid") return MicrophoneType::Supercardioid;
  return std::nullopt;
}

std::string_view to_string(MicrophoneType type) noexcept {
  switch (type) {
    case MicrophoneType::Omni: return "omni";
    case MicrophoneType::Bidirectional: return "bidirectional";
    case MicrophoneType::Cardioid: return "cardioid";
    case MicrophoneType::Hypercardioid: return "hypercardioid";
    case MicrophoneType::Supercardioid: return "supercardioid";
  }
  return "omni";
}

ArrayGeometry::ArrayGeometry(std::vector<MicrophoneElement> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "array must contain at least one microphone");
  }
  for (std::size_t m = 0; m < elements_.size(); ++m) {
    const auto& e = elements_[m];
    if (!std::isfinite(e.position_x)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite position for microphone " + std::to_string(m));
    }
    if (!(e.directivity_a >= 0.0 && e.directivity_a <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "directivity coefficient of microphone " + std::to_string(m) + " must lie in [0, 1]");
    }
    if (m > 0 && !(e.position_x > elements_[m - 1].position_x)) {
      throw Error(ErrorCode::InvalidArgument, "microphone positions must be strictly increasing");
    }
  }
}

ArrayGeometry ArrayGeometry::uniform(double spacing_m, std::span<const double> directivities) {
  if (!(spacing_m > 0.0) || !std::isfinite(spacing_m)) {
    throw Error(ErrorCode::InvalidArgument, "spacing must be positive");
  }
  const auto count = directivities.size();
  std::vector<MicrophoneElement> elements;
  elements.reserve(count);
  // Symmetric about the origin: x_m = (m - (M+1)/2) delta with m = 1..M.
  const double centre = 0.5 * static_cast<double>(count + 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double m = static_cast<double>(i + 1);
    elements.push_back({(m - centre) * spacing_m, directivities[i]});
  }
  return ArrayGeometry(std::move(elements));
}

ArrayGeometry ArrayGeometry::uniform(double spacing_m, std::span<const MicrophoneType> types) {
  std::vector<double> a;
  a.reserve(types.size());
  for (auto t : types) a.push_back(directivity_coefficient(t));
  return uniform(spacing_m, a);
}

ArrayGeometry ArrayGeometry::alternating(int count, double spacing_m, double directional_a) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "array must contain at least one microphone");
  std::vector<double> a(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) a[static_cast<std::size_t>(i)] = (i % 2 == 0) ? 1.0 : directional_a;
  return uniform(spacing_m, a);
}

RealVector ArrayGeometry::positions() const {
  RealVector x(static_cast<Eigen::Index>(size()));
  for (std::size_t m = 0; m < size(); ++m) x(static_cast<Eigen::Index>(m)) = elements_[m].position_x;
  return x;
}

RealVector ArrayGeometry::directivities() const {
  RealVector a(static_cast<Eigen::Index>(size()));
  for (std::size_t m = 0; m < size(); ++m) a(static_cast<Eigen::Index>(m)) = elements_[m].directivity_a;
  return a;
}

std::optional<double> ArrayGeometry::uniform_spacing(double tol) const {
  if (size() < 2) return std::nullopt;
  const double d = elements_[1].position_x - elements_[0].position_x;
  for (std::size_t m = 2; m < size(); ++m) {
    if (std::abs(elements_[m].position_x - elements_[m - 1].position_x - d) > tol) return std::nullopt;
  }
  return d;
}

double directivity_gain(const MicrophoneElement& element, double theta) noexcept {
  return element.directivity_a + (1.0 - element.directivity_a) * std::sin(theta);
}

ComplexVector steering_vector(const ArrayGeometry& geom, double k, double theta) {
  const double c = std::cos(theta);
  ComplexVector d(static_cast<Eigen::Index>(geom.size()));
  for (std::size_t m = 0; m < geom.size(); ++m) {
    const auto& e = geom[m];
    d(static_cast<Eigen::Index>(m)) = directivity_gain(e, theta) * std::polar(1.0, k * e.position_x * c);
  }
  return d;
}

}  // namespace diffbeam
