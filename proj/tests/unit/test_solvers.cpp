#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "diffbeam/error.hpp"
#include "diffbeam/solvers.hpp"
#include "oracles.hpp"

using namespace diffbeam;
using Catch::Approx;

namespace {

const ArrayGeometry& reference_array() {
  static const ArrayGeometry geom = ArrayGeometry::alternating(11, 0.01, 0.0);
  return geom;
}

double residual(const ConstraintSystem& cs, const ComplexVector& h) {
  return (cs.matrix * h - cs.rhs).cwiseAbs().maxCoeff();
}

struct Instance {
  ArrayGeometry geom;
  double k;
  IdealPattern pattern;
  ConstraintSystem cs;
  CoherenceMatrix gamma;
  ComplexVector q;
};

Instance make_instance(const ArrayGeometry& geom, double f, double ts, std::vector<double> offsets, int order) {
  const double k = wavenumber(f);
  auto pattern = solve_coefficients(ts, offsets, order);
  auto cs = build_constraints(geom, k, ts, offsets);
  auto gamma = gamma_matrix(geom, k);
  auto q = pattern_coupling_vector(geom, k, pattern);
  return {geom, k, std::move(pattern), std::move(cs), std::move(gamma), std::move(q)};
}

}  // namespace

TEST_CASE("constraint matrix shapes") {
  const double k = wavenumber(1000.0);
  const std::vector<double> two{kPi / 2, 5 * kPi / 6};
  const auto cs = build_constraints(reference_array(), k, kPi / 2, two);
  CHECK(cs.rows() == 5);
  CHECK(cs.mics() == 11);
  CHECK_FALSE(cs.merged_opposite_null);
  CHECK(cs.rhs(0) == Complex(1.0, 0.0));
  CHECK(cs.rhs.tail(4).cwiseAbs().maxCoeff() == 0.0);

  const std::vector<double> back{kPi / 2, kPi};
  const auto merged = build_constraints(reference_array(), k, kPi / 3, back);
  CHECK(merged.rows() == 4);
  CHECK(merged.merged_opposite_null);

  const auto small = ArrayGeometry::alternating(4, 0.01, 0.0);
  try {
    build_constraints(small, k, kPi / 2, two);
    FAIL("expected TooFewMicrophones");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewMicrophones);
  }
}

TEST_CASE("duplicated rows make the constraints rank deficient") {
  // For an all-omni array d(theta) = d(-theta), so nulls at +/- pi/2 about
  // theta_s = 0 produce identical rows.
  const std::vector<double> omni(7, 1.0);
  const auto geom = ArrayGeometry::uniform(0.01, omni);
  const std::vector<double> offsets{kPi / 2};
  try {
    build_constraints(geom, wavenumber(1000.0), 0.0, offsets);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("null-space basis is orthonormal and annihilated by D") {
  const auto inst = make_instance(reference_array(), 1500.0, kPi / 2, {kPi / 2, 5 * kPi / 6}, 2);
  const ComplexMatrix b = nullspace_basis(inst.cs);
  CHECK(b.rows() == 11);
  CHECK(b.cols() == 6);
  CHECK((b.adjoint() * b - ComplexMatrix::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((inst.cs.matrix * b).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("maximum-WNG filter is the minimum-norm feasible point") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  const auto inst = make_instance(reference_array(), 2000.0, kPi / 2, {kPi / 2, 5 * kPi / 6}, 2);
  const auto f = solve_mwng(inst.cs);
  CHECK(f.method == DesignMethod::MWNG);
  CHECK(residual(inst.cs, f.weights) <= 1e-10);
  const ComplexMatrix b = nullspace_basis(inst.cs);
  const double base = f.weights.squaredNorm();
  for (int i = 0; i < 100; ++i) {
    ComplexVector z(b.cols());
    for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = {n(rng), n(rng)};
    const ComplexVector h = f.weights + b * z * 1e-3;
    CHECK(h.squaredNorm() >= base);
  }
  CHECK(f.achieved_wng_db == Approx(wmax_db(inst.cs)).margin(1e-10));
  CHECK(white_noise_gain_db(f.weights, inst.geom, inst.k, kPi / 2) == Approx(wmax_db(inst.cs)).margin(1e-10));
}

TEST_CASE("single distortionless constraint gives uniform weights") {
  const std::vector<double> omni(6, 1.0);
  const auto geom = ArrayGeometry::uniform(0.02, omni);
  const double k = wavenumber(800.0);
  const auto cs = build_constraints(geom, k, 0.7, std::vector<double>{});
  const auto f = solve_mwng(cs);
  const ComplexVector expected = steering_vector(geom, k, 0.7) / 6.0;
  CHECK((f.weights - expected).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(wmax_db(cs) == Approx(10 * std::log10(6.0)).epsilon(1e-12));
}

TEST_CASE("INC with zero slack reproduces the maximum-WNG filter") {
  const auto inst = make_instance(reference_array(), 1000.0, kPi / 2, {kPi / 2, 5 * kPi / 6}, 2);
  const auto inc = solve_inc(inst.cs, inst.gamma, inst.q, 0.0);
  const auto mwng = solve_mwng(inst.cs);
  CHECK((inc.weights - mwng.weights).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(inc.method == DesignMethod::INC);
}

TEST_CASE("square constraint system") {
  const auto geom = ArrayGeometry::alternating(5, 0.01, 0.0);
  const auto inst = make_instance(geom, 1200.0, kPi / 2, {kPi / 2, 5 * kPi / 6}, 2);
  REQUIRE(inst.cs.rows() == inst.cs.mics());
  const auto nc = solve_nc(inst.cs);
  const auto mwng = solve_mwng(inst.cs);
  const auto inc = solve_inc(inst.cs, inst.gamma, inst.q, 10.0);
  CHECK((nc.weights - mwng.weights).cwiseAbs().maxCoeff() <= 1e-10 * nc.weights.norm());
  CHECK((inc.weights - nc.weights).cwiseAbs().maxCoeff() <= 1e-10 * nc.weights.norm());
}

TEST_CASE("INC properties across the design band") {
  for (double f : {200.0, 400.0, 800.0, 1600.0, 3200.0, 5000.0}) {
    INFO("f=" << f);
    const auto inst = make_instance(reference_array(), f, kPi / 2, {kPi / 2, 5 * kPi / 6}, 2);
    const double wmax = wmax_db(inst.cs);
    const auto nc = solve_nc(inst.cs);
    double previous = inc_objective(solve_mwng(inst.cs).weights, inst.gamma, inst.q);
    for (double v : {0.0, 2.0, 5.0, 10.0, 20.0, 40.0}) {
      const auto inc = solve_inc(inst.cs, inst.gamma, inst.q, v);
      CHECK(residual(inst.cs, inc.weights) <= 1e-8);
      CHECK(inc.achieved_wng_db >= wmax - v - 1e-6);
      REQUIRE(inc.zeta_wng_db.has_value());
      CHECK(*inc.zeta_wng_db == Approx(wmax - v).margin(1e-12));
      REQUIRE(inc.certificate.has_value());
      CHECK(inc.certificate->valid());
      const double obj = inc_objective(inc.weights, inst.gamma, inst.q);
      CHECK(obj <= previous + 1e-9 * std::abs(previous) + 1e-12);
      previous = obj;
    }
    // INC is never worse than NC because the minimum-norm NC filter is feasible for INC.
    const auto inc = solve_inc(inst.cs, inst.gamma, inst.q, 10.0);
    CHECK(mse_quadratic(inc.weights, inst.gamma, inst.q, pattern_energy(inst.pattern.coeffs())) <=
          mse_quadratic(nc.weights, inst.gamma, inst.q, pattern_energy(inst.pattern.coeffs())) + 1e-12);
  }
  const auto inst = make_instance(reference_array(), 1000.0, kPi / 2, {kPi / 2, 5 * kPi / 6}, 2);
  CHECK_THROWS_AS(solve_inc(inst.cs, inst.gamma, inst.q, -1.0), Error);
}

TEST_CASE("trust-region subproblem certificates") {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 6;
    ComplexMatrix x(dim, dim);
    ComplexVector b(dim);
    for (int i = 0; i < dim; ++i) {
      b(i) = {n(rng), n(rng)};
      for (int j = 0; j < dim; ++j) x(i, j) = {n(rng), n(rng)};
    }
    const ComplexMatrix a = x * x.adjoint();
    const double r2 = std::pow(10.0, n(rng));
    const auto sol = solve_trust_region(a, b, r2);
    CHECK(sol.step.squaredNorm() <= r2 * (1 + 1e-8));
    CHECK(sol.certificate.valid());
    // Stationarity: (A + lambda I) z = b.
    const ComplexVector g = a * sol.step + sol.certificate.lambda * sol.step - b;
    CHECK(g.norm() <= 1e-7 * (b.norm() + a.norm() * sol.step.norm()));
  }

  SECTION("hard case with b orthogonal to the minimal eigenvector") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(0, 0) = 0.0;
    a(1, 1) = 1.0;
    ComplexVector b(2);
    b << 0.0, 0.1;
    const auto sol = solve_trust_region(a, b, 1.0);
    CHECK(std::isfinite(sol.step.norm()));
    CHECK(sol.certificate.valid());
  }
}

TEST_CASE("KKT conditions hold for INC") {
  const auto inst = make_instance(reference_array(), 700.0, kPi / 2, {kPi / 2, 5 * kPi / 6}, 2);
  const auto inc = solve_inc(inst.cs, inst.gamma, inst.q, 10.0);
  const ComplexMatrix b = nullspace_basis(inst.cs);
  const double lambda = inc.certificate->lambda;
  // Projected gradient of the Lagrangian vanishes on the null space.
  const ComplexVector grad = inst.gamma.entries.cast<Complex>() * inc.weights - inst.q + lambda * inc.weights;
  CHECK((b.adjoint() * grad).norm() <= 1e-6 * inst.q.norm());
  CHECK(lambda >= 0.0);
}
