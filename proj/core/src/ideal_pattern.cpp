#include "diffbeam/ideal_pattern.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "diffbeam/error.hpp"

namespace diffbeam {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kSumTolerance = 1e-10;

bool sums_to_one(const double* a, Eigen::Index n) {
  double sum = 0.0;
  double scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    sum += a[i];
    scale += std::abs(a[i]);
  }
  return std::abs(sum - 1.0) <= kSumTolerance * scale;
}
constexpr int kBracketIntervals = 4096;

// Clenshaw summation of sum_n a_n T_n(t).
double chebyshev_sum(std::span<const double> a, double t) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t n = a.size(); n-- > 1;) {
    const double b0 = a[n] + 2.0 * t * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double a0 = a.empty() ? 0.0 : a[0];
  return a0 + t * b1 - b2;
}

}  // namespace

RealVector cos_basis(double theta, double theta_s, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "pattern order must be non-negative");
  RealVector c(order + 1);
  const double phi = theta - theta_s;
  for (int n = 0; n <= order; ++n) c(n) = std::cos(n * phi);
  return c;
}

IdealPattern::IdealPattern(RealVector coeffs, double steer_theta_s, std::vector<double> null_offsets)
    : coeffs_(std::move(coeffs)), steer_(steer_theta_s), null_offsets_(std::move(null_offsets)) {
  if (coeffs_.size() == 0) throw Error(ErrorCode::InvalidArgument, "pattern needs at least one coefficient");
  if (!sums_to_one(coeffs_.data(), coeffs_.size())) {
    throw Error(ErrorCode::InvalidCoefficients, "pattern coefficients must sum to 1");
  }
  validate_null_offsets(null_offsets_);
}

IdealPattern IdealPattern::steered_to(double theta_s) const { return IdealPattern(coeffs_, theta_s, null_offsets_); }

void validate_null_offsets(std::span<const double> offsets) {
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double o = offsets[i];
    if (!std::isfinite(o) || !(o > 0.0) || o > kPi + 1e-12) {
      throw Error(ErrorCode::InvalidNulls, "null offset " + std::to_string(o) + " rad outside (0, pi]");
    }
    if (i > 0 && !(o > offsets[i - 1])) {
      throw Error(ErrorCode::InvalidNulls, "null offsets must be distinct and strictly increasing");
    }
  }
}

IdealPattern solve_coefficients(double theta_s, std::vector<double> null_offsets, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "pattern order must be non-negative");
  if (null_offsets.size() != static_cast<std::size_t>(order)) {
    throw Error(ErrorCode::InvalidNulls, "an order-" + std::to_string(order) + " pattern needs exactly " +
                                             std::to_string(order) + " null offsets");
  }
  validate_null_offsets(null_offsets);

  // Rows use the offsets directly so the coefficients do not depend on theta_s.
  const int dim = order + 1;
  RealMatrix c(dim, dim);
  c.row(0) = cos_basis(0.0, 0.0, order).transpose();
  for (int i = 0; i < order; ++i) c.row(i + 1) = cos_basis(null_offsets[static_cast<std::size_t>(i)], 0.0, order).transpose();

  Eigen::JacobiSVD<RealMatrix> svd(c);
  const auto& sv = svd.singularValues();
  if (sv(dim - 1) <= 0.0 || sv(0) / sv(dim - 1) > kMaxCondition) {
    throw Error(ErrorCode::SingularConstraintMatrix, "null set gives a singular pattern system");
  }
  RealVector rhs = RealVector::Zero(dim);
  rhs(0) = 1.0;
  RealVector a = c.colPivHouseholderQr().solve(rhs);
  // Renormalise the tiny rounding drift in the unit-response row.
  a /= a.sum();
  return IdealPattern(std::move(a), theta_s, std::move(null_offsets));
}

double evaluate_ideal(const IdealPattern& pattern, double theta) {
  return pattern.coeffs().dot(cos_basis(theta, pattern.steer(), pattern.order()));
}

std::vector<double> nulls_from_coefficients(std::span<const double> coeffs) {
  if (coeffs.empty()) throw Error(ErrorCode::InvalidCoefficients, "empty coefficient vector");
  const double sum = std::accumulate(coeffs.begin(), coeffs.end(), 0.0);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(ErrorCode::InvalidCoefficients, "coefficients sum to " + std::to_string(sum) + ", expected 1");
  }
  const auto order = coeffs.size() - 1;
  std::vector<double> nulls;
  if (order == 0) return nulls;

  const auto value = [&](double phi) { return chebyshev_sum(coeffs, std::cos(phi)); };
  const double step = kPi / kBracketIntervals;

  // Exact grid hits are accepted as roots; the left node phi = 0 always has value 1.
  double prev_phi = 0.0;
  double prev_val = value(0.0);
  for (int i = 1; i <= kBracketIntervals; ++i) {
    const double phi = (i == kBracketIntervals) ? kPi : i * step;
    const double val = value(phi);
    if (val == 0.0 || (i == kBracketIntervals && std::abs(val) <= 1e-12)) {
      nulls.push_back(phi);
    } else if (prev_val != 0.0 && std::signbit(val) != std::signbit(prev_val)) {
      double lo = prev_phi;
      double hi = phi;
      double flo = prev_val;
      // Bisect to the resolution of double precision.
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = value(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(flo)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      nulls.push_back(0.5 * (lo + hi));
    }
    prev_phi = phi;
    prev_val = val;
  }
  return nulls;
}

double pattern_energy(const RealVector& coeffs) {
  if (coeffs.size() == 0) return 0.0;
  return coeffs(0) * coeffs(0) + 0.5 * coeffs.tail(coeffs.size() - 1).squaredNorm();
}

}  // namespace diffbeam
