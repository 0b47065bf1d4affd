#pragma once

#include <span>
#include <vector>

#include "diffbeam/types.hpp"

namespace diffbeam {

// [1, cos(theta - theta_s), ..., cos(N (theta - theta_s))].
RealVector cos_basis(double theta, double theta_s, int order);

/// N-th order steerable differential pattern sum_n a_n cos(n (theta - theta_s)).
///
/// Coefficients sum to one (unit response at theta_s). The null offsets are the
/// distinct angles in (0, pi] measured from theta_s where the pattern vanishes;
/// by evenness the pattern also vanishes at theta_s minus each offset.
class IdealPattern {
 public:
  IdealPattern(RealVector coeffs, double steer_theta_s, std::vector<double> null_offsets);

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const RealVector& coeffs() const noexcept { return coeffs_; }
  double steer() const noexcept { return steer_; }
  const std::vector<double>& null_offsets() const noexcept { return null_offsets_; }

  // Same coefficients steered to a different direction.
  IdealPattern steered_to(double theta_s) const;

 private:
  RealVector coeffs_;
  double steer_;
  std::vector<double> null_offsets_;
};

// Checks that offsets are strictly increasing, distinct and inside (0, pi].
// Throws Error(InvalidNulls).
void validate_null_offsets(std::span<const double> offsets);

// Coefficients from a unit response at theta_s and zeros at theta_s + offset.
// Throws InvalidNulls or SingularConstraintMatrix (condition number > 1e12).
IdealPattern solve_coefficients(double theta_s, std::vector<double> null_offsets, int order);

double evaluate_ideal(const IdealPattern& pattern, double theta);

// All offsets phi in (0, pi] with sum_n a_n cos(n phi) = 0, ascending. Uses the
// Chebyshev form in t = cos(phi), bracketed on a 4096-interval grid and refined
// by bisection. Throws InvalidCoefficients when the coefficients do not sum to 1.
std::vector<double> nulls_from_coefficients(std::span<const double> coeffs);

// xi = a^T Cbar a, the mean square of the pattern over the circle.
double pattern_energy(const RealVector& coeffs);

}  // namespace diffbeam
