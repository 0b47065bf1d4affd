#include "diffbeam/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "diffbeam/error.hpp"

namespace diffbeam {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kOppositeNullTol = 1e-12;
constexpr double kRegularization = 1e-12;
constexpr double kRadiusRelTol = 1e-10;

void require_full_row_rank(const ComplexMatrix& d) {
  if (d.rows() == 0) throw Error(ErrorCode::RankDeficient, "empty constraint matrix");
  Eigen::JacobiSVD<ComplexMatrix> svd(d);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (sv.size() < d.rows() || !(smallest > 0.0) || sv(0) / smallest > kMaxCondition) {
    throw Error(ErrorCode::RankDeficient, "constraint matrix is rank deficient (condition > 1e12)");
  }
}

// Householder QR of D^H = [Q1 Q2] [R; 0]. Q1 spans the row space of D, Q2 its
// null space, and the minimum-norm solution of D h = gamma is Q1 R^-H gamma.
struct RowSpaceSplit {
  ComplexMatrix range_basis;
  ComplexMatrix null_basis;
  ComplexVector min_norm_solution;
};

RowSpaceSplit split_row_space(const ConstraintSystem& cs) {
  if (cs.rhs.size() != cs.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "constraint right-hand side length differs from row count");
  }
  if (cs.mics() < cs.rows()) {
    throw Error(ErrorCode::TooFewMicrophones, "need at least " + std::to_string(cs.rows()) + " microphones, have " +
                                                  std::to_string(cs.mics()));
  }
  require_full_row_rank(cs.matrix);

  const Eigen::Index m = cs.mics();
  const Eigen::Index r = cs.rows();
  Eigen::HouseholderQR<ComplexMatrix> qr(cs.matrix.adjoint());
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, m);
  const ComplexMatrix upper = qr.matrixQR().topLeftCorner(r, r).triangularView<Eigen::Upper>();

  RowSpaceSplit split;
  split.range_basis = q.leftCols(r);
  split.null_basis = q.rightCols(m - r);
  const ComplexVector y = upper.adjoint().triangularView<Eigen::Lower>().solve(cs.rhs);
  split.min_norm_solution = split.range_basis * y;
  return split;
}

double residual_inf(const ConstraintSystem& cs, const ComplexVector& h) {
  return (cs.matrix * h - cs.rhs).cwiseAbs().maxCoeff();
}

double achieved_wng_db(const ConstraintSystem& cs, const ComplexVector& h) {
  const Complex response = cs.matrix.row(0).dot(h.conjugate());  // d^H h, row already conjugated
  return to_db(std::norm(response) / h.squaredNorm());
}

BeamformerFilter make_filter(const ConstraintSystem& cs, ComplexVector h, DesignMethod method) {
  BeamformerFilter f;
  f.constraint_residual = residual_inf(cs, h);
  f.achieved_wng_db = achieved_wng_db(cs, h);
  f.weights = std::move(h);
  f.method = method;
  return f;
}

}  // namespace

std::string_view to_string(DesignMethod method) noexcept {
  switch (method) {
    case DesignMethod::NC: return "NC";
    case DesignMethod::MWNG: return "mWNG";
    case DesignMethod::INC: return "INC";
  }
  return "NC";
}

std::optional<DesignMethod> parse_design_method(std::string_view name) noexcept {
  if (name == "nc" || name == "NC") return DesignMethod::NC;
  if (name == "inc" || name == "INC") return DesignMethod::INC;
  if (name == "mwng" || name == "mWNG" || name == "MWNG") return DesignMethod::MWNG;
  return std::nullopt;
}

ConstraintSystem build_constraints(const ArrayGeometry& geom, double k, double theta_s,
                                   std::span<const double> null_offsets) {
  validate_null_offsets(null_offsets);

  std::vector<double> directions{theta_s};
  bool merged = false;
  for (double offset : null_offsets) {
    directions.push_back(theta_s + offset);
    if (std::abs(offset - kPi) <= kOppositeNullTol) {
      merged = true;  // theta_s + pi and theta_s - pi are the same direction
    } else {
      directions.push_back(theta_s - offset);
    }
  }

  const auto rows = static_cast<Eigen::Index>(directions.size());
  const auto mics = static_cast<Eigen::Index>(geom.size());
  if (mics < rows) {
    throw Error(ErrorCode::TooFewMicrophones, "an order-" + std::to_string(null_offsets.size()) + " design needs at least " +
                                                  std::to_string(rows) + " microphones, array has " +
                                                  std::to_string(mics));
  }

  ConstraintSystem cs;
  cs.matrix.resize(rows, mics);
  for (Eigen::Index i = 0; i < rows; ++i) {
    cs.matrix.row(i) = steering_vector(geom, k, directions[static_cast<std::size_t>(i)]).adjoint();
  }
  cs.rhs = ComplexVector::Zero(rows);
  cs.rhs(0) = 1.0;
  cs.merged_opposite_null = merged;
  cs.wavenumber = k;
  cs.theta_s = theta_s;
  require_full_row_rank(cs.matrix);
  return cs;
}

ComplexMatrix nullspace_basis(const ConstraintSystem& cs) { return split_row_space(cs).null_basis; }

BeamformerFilter solve_mwng(const ConstraintSystem& cs) {
  return make_filter(cs, split_row_space(cs).min_norm_solution, DesignMethod::MWNG);
}

BeamformerFilter solve_nc(const ConstraintSystem& cs) {
  if (cs.rows() == cs.mics()) {
    require_full_row_rank(cs.matrix);
    ComplexVector h = cs.matrix.partialPivLu().solve(cs.rhs);
    return make_filter(cs, std::move(h), DesignMethod::NC);
  }
  auto f = solve_mwng(cs);
  f.method = DesignMethod::NC;
  return f;
}

double wmax_db(const ConstraintSystem& cs) {
  return -to_db(split_row_space(cs).min_norm_solution.squaredNorm());
}

double inc_objective(const ComplexVector& h, const CoherenceMatrix& gamma, const ComplexVector& q) {
  return h.dot(gamma.entries.cast<Complex>() * h).real() - 2.0 * h.dot(q).real();
}

TrustRegionSolution solve_trust_region(const ComplexMatrix& a, const ComplexVector& b, double radius_sq) {
  const Eigen::Index dim = a.rows();
  if (a.cols() != dim || b.size() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "trust-region matrix and vector sizes differ");
  }
  if (!(radius_sq >= 0.0) || !std::isfinite(radius_sq)) {
    throw Error(ErrorCode::InvalidArgument, "trust-region radius must be finite and non-negative");
  }

  TrustRegionSolution out;
  out.certificate.radius_sq = radius_sq;
  if (dim == 0) {
    out.step = ComplexVector::Zero(0);
    return out;
  }
  if (radius_sq == 0.0) {
    // The ball is a single point; any multiplier certifies it.
    out.step = ComplexVector::Zero(dim);
    out.certificate.lambda = std::numeric_limits<double>::infinity();
    return out;
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::TrustRegionHardCase, "eigendecomposition of the reduced Hessian failed");
  }
  const RealVector& w = eig.eigenvalues();  // ascending
  const ComplexMatrix& v = eig.eigenvectors();
  const ComplexVector beta = v.adjoint() * b;
  const RealVector beta_sq = beta.cwiseAbs2();
  const double radius = std::sqrt(radius_sq);

  const auto step_norm_sq = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) s += beta_sq(i) / ((w(i) + lambda) * (w(i) + lambda));
    return s;
  };
  const auto step_at = [&](double lambda) {
    ComplexVector coords(dim);
    for (Eigen::Index i = 0; i < dim; ++i) coords(i) = beta(i) / (w(i) + lambda);
    return ComplexVector(v * coords);
  };

  const double w_min = w(0);
  const double a_norm = w.cwiseAbs().maxCoeff();

  // Interior: A positive definite and the unconstrained minimiser fits.
  if (w_min > 0.0 && step_norm_sq(0.0) <= radius_sq) {
    out.step = step_at(0.0);
    out.certificate.lambda = 0.0;
    out.certificate.step_norm_sq = out.step.squaredNorm();
    return out;
  }

  // Hard case: b has no component along the minimal eigenspace and the
  // multiplier -w_min leaves the step strictly inside the ball.
  const double lambda_floor = std::max(0.0, -w_min);
  const double eig_tol = 1e-12 * std::max(1.0, a_norm);
  const double b_norm = b.norm();
  double min_space_weight = 0.0;
  Eigen::Index min_space_dim = 0;
  while (min_space_dim < dim && w(min_space_dim) - w_min <= eig_tol) {
    min_space_weight += beta_sq(min_space_dim);
    ++min_space_dim;
  }
  if (w_min <= 0.0 && std::sqrt(min_space_weight) <= 1e-12 * std::max(1.0, b_norm)) {
    ComplexVector coords = ComplexVector::Zero(dim);
    double partial = 0.0;
    for (Eigen::Index i = min_space_dim; i < dim; ++i) {
      coords(i) = beta(i) / (w(i) + lambda_floor);
      partial += std::norm(coords(i));
    }
    if (partial <= radius_sq) {
      coords(0) = std::sqrt(radius_sq - partial);
      out.step = v * coords;
      out.certificate.lambda = lambda_floor;
      out.certificate.step_norm_sq = out.step.squaredNorm();
      out.certificate.hard_case = true;
      if (!out.certificate.valid()) {
        throw Error(ErrorCode::TrustRegionHardCase, "eigenvector fallback failed to reach the boundary");
      }
      return out;
    }
  }

  // Boundary: ||z(lambda)|| = r on (lambda_floor, hi]. Newton on
  // psi(lambda) = 1/||z|| - 1/r, which is nearly linear, kept inside the bracket.
  double lo = lambda_floor;
  double hi = b_norm / radius + a_norm;
  while (step_norm_sq(hi) > radius_sq) hi *= 2.0;
  double lambda = hi;
  for (int it = 0; it < 500; ++it) {
    const double s = step_norm_sq(lambda);
    const double norm = std::sqrt(s);
    if (std::abs(norm - radius) <= kRadiusRelTol * radius) break;
    if (norm > radius) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    double ds = 0.0;  // d(||z||^2)/d(lambda)
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double shifted = w(i) + lambda;
      ds -= 2.0 * beta_sq(i) / (shifted * shifted * shifted);
    }
    // psi = s^-1/2 - 1/r, psi' = -s^-3/2 ds / 2
    const double psi = 1.0 / norm - 1.0 / radius;
    const double dpsi = -0.5 * ds / (s * norm);
    double next = (dpsi != 0.0 && std::isfinite(dpsi)) ? lambda - psi / dpsi : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == lambda) break;
    lambda = next;
  }

  out.step = step_at(lambda);
  out.certificate.lambda = lambda;
  out.certificate.step_norm_sq = out.step.squaredNorm();
  if (!out.certificate.valid()) {
    throw Error(ErrorCode::TrustRegionHardCase, "secular equation did not converge");
  }
  return out;
}

BeamformerFilter solve_inc(const ConstraintSystem& cs, const CoherenceMatrix& gamma, const ComplexVector& q,
                           double v_slack_db) {
  if (!(v_slack_db >= 0.0) || !std::isfinite(v_slack_db)) {
    throw Error(ErrorCode::InfeasibleSlack, "WNG slack must be finite and >= 0 dB");
  }
  if (gamma.entries.rows() != cs.mics() || q.size() != cs.mics()) {
    throw Error(ErrorCode::DimensionMismatch, "coherence matrix or coupling vector does not match the array");
  }

  const auto split = split_row_space(cs);
  const ComplexVector& h0 = split.min_norm_solution;
  const double h0_energy = h0.squaredNorm();
  const double w_max = -to_db(h0_energy);
  const double zeta = w_max - v_slack_db;

  const ComplexMatrix& basis = split.null_basis;
  if (basis.cols() == 0) {
    auto f = solve_nc(cs);
    f.method = DesignMethod::INC;
    f.zeta_wng_db = zeta;
    f.certificate = TrustRegionCertificate{};
    return f;
  }

  // 10^(v/10) - 1 without cancellation for small v.
  const double radius_sq = h0_energy * std::expm1(v_slack_db * std::log(10.0) / 10.0);

  const ComplexMatrix g = gamma.entries.cast<Complex>();
  ComplexMatrix a = basis.adjoint() * g * basis;
  a = 0.5 * (a + a.adjoint()).eval();
  const double reg = kRegularization * a.trace().real() / static_cast<double>(a.rows());
  a.diagonal().array() += reg;
  const ComplexVector b = basis.adjoint() * (q - g * h0);

  const auto trs = solve_trust_region(a, b, radius_sq);
  ComplexVector h = h0 + basis * trs.step;

  auto f = make_filter(cs, std::move(h), DesignMethod::INC);
  f.zeta_wng_db = zeta;
  f.certificate = trs.certificate;
  return f;
}

}  // namespace diffbeam
