#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "diffbeam/array_model.hpp"
#include "diffbeam/metrics.hpp"
#include "diffbeam/types.hpp"

namespace diffbeam {

/// Linear constraints D h = gamma: unit response at theta_s (row 0) and zero
/// response at theta_s + offset and theta_s - offset for each null. An offset
/// of pi produces a single merged row since both directions coincide.
struct ConstraintSystem {
  ComplexMatrix matrix;  // R x M, rows are steering vectors conjugate-transposed
  ComplexVector rhs;     // [1, 0, ..., 0]
  bool merged_opposite_null = false;
  double wavenumber = 0.0;
  double theta_s = 0.0;

  Eigen::Index rows() const noexcept { return matrix.rows(); }
  Eigen::Index mics() const noexcept { return matrix.cols(); }
};

enum class DesignMethod { NC, MWNG, INC };

std::string_view to_string(DesignMethod method) noexcept;
std::optional<DesignMethod> parse_design_method(std::string_view name) noexcept;

/// Optimality certificate of the ball-constrained subproblem
///   min z^H A z - 2 Re(z^H b)  s.t.  ||z||^2 <= radius_sq.
/// Either the multiplier vanishes and the step is interior, or the step lies
/// on the sphere.
struct TrustRegionCertificate {
  double lambda = 0.0;
  double step_norm_sq = 0.0;
  double radius_sq = 0.0;
  bool hard_case = false;

  bool interior() const noexcept { return lambda <= 1e-12 && step_norm_sq <= radius_sq; }
  bool on_boundary() const noexcept { return std::abs(step_norm_sq - radius_sq) <= 1e-8 * radius_sq; }
  bool valid() const noexcept { return interior() || on_boundary(); }
};

struct TrustRegionSolution {
  ComplexVector step;
  TrustRegionCertificate certificate;
};

// Exact solve through the eigendecomposition of the Hermitian matrix A. The
// multiplier is found by safeguarded Newton on 1/||z(lambda)|| - 1/r; the hard
// case falls back to adding a minimal eigenvector component.
TrustRegionSolution solve_trust_region(const ComplexMatrix& a, const ComplexVector& b, double radius_sq);

struct BeamformerFilter {
  ComplexVector weights;
  double frequency_hz = 0.0;  // stamped by the broadband designer; 0 for standalone solves
  DesignMethod method = DesignMethod::NC;
  double achieved_wng_db = 0.0;
  double constraint_residual = 0.0;  // ||D h - gamma||_inf
  std::optional<double> zeta_wng_db;  // WNG floor used by INC
  std::optional<TrustRegionCertificate> certificate;
};

// Throws InvalidNulls, TooFewMicrophones (M < R) or RankDeficient (condition > 1e12).
ConstraintSystem build_constraints(const ArrayGeometry& geom, double k, double theta_s,
                                   std::span<const double> null_offsets);

// Orthonormal basis of the null space of D, M x (M - R).
ComplexMatrix nullspace_basis(const ConstraintSystem& cs);

// Minimum-norm feasible filter D^H (D D^H)^-1 gamma.
BeamformerFilter solve_mwng(const ConstraintSystem& cs);

// D^-1 gamma when D is square, otherwise the minimum-norm solution.
BeamformerFilter solve_nc(const ConstraintSystem& cs);

// Maximum achievable WNG under the constraints, -10 log10 ||h_mWNG||^2.
double wmax_db(const ConstraintSystem& cs);

/// Minimises h^H G h - 2 Re(h^H q) subject to D h = gamma and
/// ||h||^2 <= 10^(-zeta/10), zeta = W_max - v_slack_db.
///
/// Writing h = h_mWNG + B z with B an orthonormal null-space basis reduces the
/// problem to a trust-region subproblem in z, because h_mWNG is orthogonal to
/// range(B) and the ball becomes ||z||^2 <= ||h_mWNG||^2 (10^(v/10) - 1).
BeamformerFilter solve_inc(const ConstraintSystem& cs, const CoherenceMatrix& gamma, const ComplexVector& q,
                           double v_slack_db);

// h^H G h - 2 Re(h^H q), the part of the MSE the INC program minimises.
double inc_objective(const ComplexVector& h, const CoherenceMatrix& gamma, const ComplexVector& q);

}  // namespace diffbeam
