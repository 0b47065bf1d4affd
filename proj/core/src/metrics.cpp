#include "diffbeam/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "diffbeam/bessel.hpp"
#include "diffbeam/error.hpp"

namespace diffbeam {
namespace {

constexpr double kMseFloor = 1e-300;

// j^n for any integer n.
Complex j_power(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

void require_length(const ComplexVector& h, const ArrayGeometry& geom) {
  if (static_cast<std::size_t>(h.size()) != geom.size()) {
    throw Error(ErrorCode::DimensionMismatch, "filter length " + std::to_string(h.size()) +
                                                  " does not match array size " + std::to_string(geom.size()));
  }
}

}  // namespace

double to_db(double ratio) noexcept { return 10.0 * std::log10(ratio); }

double mse_to_db(double mse) noexcept { return 10.0 * std::log10(std::max(mse, kMseFloor)); }

CoherenceMatrix gamma_matrix(const ArrayGeometry& geom, double k) {
  const auto size = static_cast<Eigen::Index>(geom.size());
  CoherenceMatrix out{RealMatrix(size, size), k};
  for (Eigen::Index m = 0; m < size; ++m) {
    const auto& em = geom[static_cast<std::size_t>(m)];
    for (Eigen::Index n = m; n < size; ++n) {
      const auto& en = geom[static_cast<std::size_t>(n)];
      const auto j = bessel_j_sequence(2, k * (em.position_x - en.position_x));
      const double am = em.directivity_a;
      const double an = en.directivity_a;
      const double value =
          0.5 * (1.0 - (am + an) + 3.0 * am * an) * j[0] + 0.5 * (1.0 - am) * (1.0 - an) * j[2];
      out.entries(m, n) = value;
      out.entries(n, m) = value;
    }
  }
  return out;
}

PatternCouplingMatrix q_coupling_matrix(const ArrayGeometry& geom, double k, double theta_s, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "pattern order must be non-negative");
  const auto size = static_cast<Eigen::Index>(geom.size());
  PatternCouplingMatrix out{ComplexMatrix(size, order + 1)};
  for (Eigen::Index m = 0; m < size; ++m) {
    const auto& e = geom[static_cast<std::size_t>(m)];
    const auto j = bessel_j_sequence(order + 1, k * e.position_x);
    // J_{-1} = -J_1
    const auto jn = [&](int n) { return n < 0 ? -j[1] : j[static_cast<std::size_t>(n)]; };
    const double a = e.directivity_a;
    for (int n = 0; n <= order; ++n) {
      const Complex omni_part = j_power(n) * jn(n) * a * std::cos(n * theta_s);
      const Complex dipole_part = 0.5 * (1.0 - a) * std::sin(n * theta_s) *
                                  (j_power(n + 1) * jn(n + 1) - j_power(n - 1) * jn(n - 1));
      out.entries(m, n) = omni_part - dipole_part;
    }
  }
  return out;
}

ComplexVector pattern_coupling_vector(const ArrayGeometry& geom, double k, const IdealPattern& pattern) {
  const auto q = q_coupling_matrix(geom, k, pattern.steer(), pattern.order());
  return q.entries * pattern.coeffs().cast<Complex>();
}

RealMatrix cbar_matrix(int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "pattern order must be non-negative");
  RealMatrix c = RealMatrix::Zero(order + 1, order + 1);
  c(0, 0) = 1.0;
  for (int n = 1; n <= order; ++n) c(n, n) = 0.5;
  return c;
}

Complex beampattern(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta) {
  require_length(h, geom);
  return h.dot(steering_vector(geom, k, theta));  // dot() conjugates the left operand
}

double white_noise_gain(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s) {
  require_length(h, geom);
  const double energy = h.squaredNorm();
  if (!(energy > 0.0)) throw Error(ErrorCode::ZeroFilter, "white noise gain of an all-zero filter");
  return std::norm(beampattern(h, geom, k, theta_s)) / energy;
}

double directivity_factor(const ComplexVector& h, const ComplexVector& d_s, const CoherenceMatrix& gamma) {
  if (h.size() != d_s.size() || h.size() != gamma.entries.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "filter, steering vector and coherence matrix sizes differ");
  }
  const double denom = h.dot(gamma.entries.cast<Complex>() * h).real();
  if (!(denom > 0.0)) throw Error(ErrorCode::DegenerateDenominator, "h^H G h is not positive");
  return std::norm(h.dot(d_s)) / denom;
}

double directivity_factor(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s) {
  require_length(h, geom);
  return directivity_factor(h, steering_vector(geom, k, theta_s), gamma_matrix(geom, k));
}

double mse_quadratic(const ComplexVector& h, const CoherenceMatrix& gamma, const ComplexVector& q, double xi) {
  if (h.size() != q.size() || h.size() != gamma.entries.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "filter, coupling vector and coherence matrix sizes differ");
  }
  const double quad = h.dot(gamma.entries.cast<Complex>() * h).real();
  return quad - 2.0 * h.dot(q).real() + xi;
}

double mse_quadratic(const ComplexVector& h, const ArrayGeometry& geom, double k, const IdealPattern& pattern) {
  require_length(h, geom);
  return mse_quadratic(h, gamma_matrix(geom, k), pattern_coupling_vector(geom, k, pattern),
                       pattern_energy(pattern.coeffs()));
}

double white_noise_gain_db(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s) {
  return to_db(white_noise_gain(h, geom, k, theta_s));
}

double directivity_factor_db(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s) {
  return to_db(directivity_factor(h, geom, k, theta_s));
}

double mse_quadratic_db(const ComplexVector& h, const ArrayGeometry& geom, double k, const IdealPattern& pattern) {
  return mse_to_db(mse_quadratic(h, geom, k, pattern));
}

double ideal_directivity_factor_db(const IdealPattern& pattern) {
  return to_db(1.0 / pattern_energy(pattern.coeffs()));
}

}  // namespace diffbeam
