#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace diffbeam::oracle {
namespace {

double node_angle(int i, int nodes) { return 2.0 * kPi * i / nodes; }

ComplexVector raw_steering(const ArrayGeometry& geom, double k, double theta) {
  // Written out from the signal model rather than calling steering_vector().
  ComplexVector d(static_cast<Eigen::Index>(geom.size()));
  for (std::size_t m = 0; m < geom.size(); ++m) {
    const double a = geom[m].directivity_a;
    const double gain = a + (1.0 - a) * std::sin(theta);
    const double phase = k * geom[m].position_x * std::cos(theta);
    d(static_cast<Eigen::Index>(m)) = Complex(gain * std::cos(phase), gain * std::sin(phase));
  }
  return d;
}

double raw_ideal(const RealVector& coeffs, double theta, double theta_s) {
  double sum = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) sum += coeffs(n) * std::cos(static_cast<double>(n) * (theta - theta_s));
  return sum;
}

}  // namespace

ComplexMatrix gamma_matrix_quadrature(const ArrayGeometry& geom, double k, int nodes) {
  const auto m = static_cast<Eigen::Index>(geom.size());
  ComplexMatrix acc = ComplexMatrix::Zero(m, m);
  for (int i = 0; i < nodes; ++i) {
    const ComplexVector d = raw_steering(geom, k, node_angle(i, nodes));
    acc.noalias() += d * d.adjoint();
  }
  return acc / static_cast<double>(nodes);
}

ComplexMatrix q_matrix_quadrature(const ArrayGeometry& geom, double k, double theta_s, int order, int nodes) {
  const auto m = static_cast<Eigen::Index>(geom.size());
  ComplexMatrix acc = ComplexMatrix::Zero(m, order + 1);
  for (int i = 0; i < nodes; ++i) {
    const double theta = node_angle(i, nodes);
    const ComplexVector d = raw_steering(geom, k, theta);
    for (int n = 0; n <= order; ++n) acc.col(n) += d * std::cos(n * (theta - theta_s));
  }
  return acc / static_cast<double>(nodes);
}

RealMatrix cbar_quadrature(int order, double theta_s, int nodes) {
  RealMatrix acc = RealMatrix::Zero(order + 1, order + 1);
  for (int i = 0; i < nodes; ++i) {
    const double theta = node_angle(i, nodes);
    RealVector c(order + 1);
    for (int n = 0; n <= order; ++n) c(n) = std::cos(n * (theta - theta_s));
    acc.noalias() += c * c.transpose();
  }
  return acc / static_cast<double>(nodes);
}

double mse_direct(const ComplexVector& h, const ArrayGeometry& geom, double k, const IdealPattern& pattern, int nodes) {
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double theta = node_angle(i, nodes);
    const Complex b = h.dot(raw_steering(geom, k, theta));
    acc += std::norm(b - raw_ideal(pattern.coeffs(), theta, pattern.steer()));
  }
  return acc / nodes;
}

double directivity_quadrature(const ComplexVector& h, const ArrayGeometry& geom, double k, double theta_s, int nodes) {
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) acc += std::norm(h.dot(raw_steering(geom, k, node_angle(i, nodes))));
  return std::norm(h.dot(raw_steering(geom, k, theta_s))) / (acc / nodes);
}

double bessel_series(int n, double x) {
  const int order = std::abs(n);
  const long double half = 0.5L * static_cast<long double>(x);
  long double term = 1.0L;
  for (int i = 1; i <= order; ++i) term *= half / i;
  long double sum = term;
  for (int k = 1; k < 400; ++k) {
    term *= -(half * half) / (static_cast<long double>(k) * (k + order));
    sum += term;
    if (std::fabs(term) < 1e-30L * std::max(1.0L, std::fabs(sum))) break;
  }
  const double value = static_cast<double>(sum);
  return (n < 0 && order % 2 == 1) ? -value : value;
}

ReferenceSolution projected_gradient_inc(const ComplexMatrix& d, const ComplexVector& gamma_rhs, const RealMatrix& g,
                                         const ComplexVector& q, double rho, int max_iterations) {
  const ComplexMatrix ddh = d * d.adjoint();
  const Eigen::LDLT<ComplexMatrix> normal(ddh);
  const ComplexVector h0 = d.adjoint() * normal.solve(gamma_rhs);
  const double outer_sq = std::max(0.0, rho - h0.squaredNorm());

  const auto project = [&](const ComplexVector& u) {
    ComplexVector w = u - d.adjoint() * normal.solve(d * u - gamma_rhs) - h0;
    const double wn = w.squaredNorm();
    if (wn > outer_sq) w *= std::sqrt(outer_sq / wn);
    return ComplexVector(h0 + w);
  };
  const ComplexMatrix gc = g.cast<Complex>();
  const auto objective = [&](const ComplexVector& h) { return h.dot(gc * h).real() - 2.0 * h.dot(q).real(); };

  // f(h) as a function of the real and imaginary parts has gradient 2 (G h - q)
  // and Lipschitz constant 2 lambda_max(G).
  const double lipschitz = 2.0 * std::max(1e-300, Eigen::SelfAdjointEigenSolver<RealMatrix>(g).eigenvalues().maxCoeff());
  const double step = 1.0 / lipschitz;

  ComplexVector h = h0;
  ComplexVector y = h0;
  double t = 1.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    const ComplexVector next = project(y - step * 2.0 * (gc * y - q));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - h);
    const double moved = (next - h).norm();
    h = next;
    t = t_next;
    if (moved <= 1e-15 * (1.0 + h.norm()) && it > 100) break;
  }
  return {h, objective(h), it};
}

ArrayGeometry random_geometry(std::mt19937_64& rng, int min_mics, int max_mics) {
  std::uniform_int_distribution<int> count(min_mics, max_mics);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int m = count(rng);
  std::vector<MicrophoneElement> elements;
  double x = -0.05 * unit(rng);
  for (int i = 0; i < m; ++i) {
    x += 0.005 + 0.02 * unit(rng);
    // Mix of exact presets and arbitrary coefficients.
    const double pick = unit(rng);
    const double a = pick < 0.3 ? 1.0 : pick < 0.5 ? 0.0 : unit(rng);
    elements.push_back({x, a});
  }
  return ArrayGeometry(std::move(elements));
}

std::vector<double> random_null_offsets(std::mt19937_64& rng, int order, double min_separation) {
  std::uniform_real_distribution<double> angle(min_separation, kPi);
  for (;;) {
    std::vector<double> offsets;
    for (int i = 0; i < order; ++i) offsets.push_back(angle(rng));
    std::sort(offsets.begin(), offsets.end());
    bool ok = true;
    for (std::size_t i = 1; i < offsets.size(); ++i) ok = ok && offsets[i] - offsets[i - 1] >= min_separation;
    if (ok) return offsets;
  }
}

}  // namespace diffbeam::oracle
