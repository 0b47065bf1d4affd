#pragma once

#include "diffbeam/array_model.hpp"
#include "diffbeam/ideal_pattern.hpp"
#include "diffbeam/types.hpp"

namespace diffbeam {

/// Pseudo-coherence matrix of a cylindrically isotropic noise field,
/// (1/2pi) * integral of d(theta) d(theta)^H over the circle, in closed form:
///
///   G_mn = 1/2 [1 - (a_m + a_n) + 3 a_m a_n] J0(k (x_m - x_n))
///        + 1/2 (1 - a_m)(1 - a_n) J2(k (x_m - x_n))
///
/// Real, symmetric and positive semidefinite.
struct CoherenceMatrix {
  RealMatrix entries;
  double wavenumber = 0.0;
};

CoherenceMatrix gamma_matrix(const ArrayGeometry& geom, double k);

/// Q = (1/2pi) * integral of d(theta) c^T(theta) over the circle (M x (N+1)).
/// q = Q a is the cross term between the array response and a target pattern.
struct PatternCouplingMatrix {
  ComplexMatrix entries;
};

PatternCouplingMatrix q_coupling_matrix(const ArrayGeometry& geom, double k, double theta_s, int order);

// q = Q a for the pattern's own steering direction and order.
ComplexVector pattern_coupling_vector(const ArrayGeometry& geom, double k, const IdealPattern& pattern);

// (1/2pi) * integral of c c^T = diag(1, 0.5, ..., 0.5).
RealMatrix cbar_matrix(int order);

// B(h, theta) = h^H d(k, theta). Throws DimensionMismatch.
Complex beampattern(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta);

// Linear-scale metrics.
double white_noise_gain(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s);
double directivity_factor(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s);
double directivity_factor(const ComplexVector& h, const ComplexVector& d_s, const CoherenceMatrix& gamma);

// eps = h^H G h - 2 Re(h^H q) + xi, clamped at zero from below only by the dB wrapper.
double mse_quadratic(const ComplexVector& h, const CoherenceMatrix& gamma, const ComplexVector& q, double xi);
double mse_quadratic(const ComplexVector& h, const ArrayGeometry& geom, double k, const IdealPattern& pattern);

// dB-scale metrics as reported.
double white_noise_gain_db(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s);
double directivity_factor_db(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s);
double mse_quadratic_db(const ComplexVector& h, const ArrayGeometry& geom, double k, const IdealPattern& pattern);

// DF of the target pattern itself, 10 log10(1 / xi).
double ideal_directivity_factor_db(const IdealPattern& pattern);

// 10 log10(max(value, 1e-300)).
double mse_to_db(double mse) noexcept;

}  // namespace diffbeam
