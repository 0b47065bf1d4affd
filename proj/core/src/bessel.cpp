#include "diffbeam/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "diffbeam/error.hpp"

namespace diffbeam {
namespace {

constexpr int kMaxOrder = 64;
constexpr double kRescaleAbove = 1e250;

// Miller's algorithm: recur downward from a start index well above both the
// requested order and x, then normalise with J_0 + 2 sum_k J_2k = 1. Valid for
// x > 0; the minimal solution is stable in the downward direction.
std::vector<double> miller_sequence(int max_order, double x) {
  const double reach = std::max(static_cast<double>(max_order), x);
  int start = static_cast<int>(reach) + 20 + static_cast<int>(std::sqrt(60.0 * reach));
  start += start % 2;

  std::vector<double> j(static_cast<std::size_t>(max_order) + 1, 0.0);
  double next = 0.0;   // J_{k+1}
  double cur = 1e-300; // J_k, arbitrary seed
  double norm = 0.0;
  const double two_over_x = 2.0 / x;

  for (int k = start; k >= 1; --k) {
    const double prev = k * two_over_x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > kRescaleAbove) {
      cur /= kRescaleAbove;
      next /= kRescaleAbove;
      norm /= kRescaleAbove;
      for (auto& v : j) v /= kRescaleAbove;
    }
    const int order = k - 1;
    if (order <= max_order) j[static_cast<std::size_t>(order)] = cur;
    if (order > 0 && order % 2 == 0) norm += 2.0 * cur;
  }
  norm += cur;  // J_0 term
  for (auto& v : j) v /= norm;
  return j;
}

}  // namespace

std::vector<double> bessel_j_sequence(int max_order, double x) {
  if (max_order < 0 || max_order > kMaxOrder) {
    throw Error(ErrorCode::InvalidArgument, "Bessel order out of range: " + std::to_string(max_order));
  }
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "Bessel argument must be finite");

  if (x == 0.0) {
    std::vector<double> j(static_cast<std::size_t>(max_order) + 1, 0.0);
    j[0] = 1.0;
    return j;
  }
  std::vector<double> j;
  if (std::abs(x) < 1e-8) {
    // Two-term power series; the next term is below 1e-32 relative.
    j.resize(static_cast<std::size_t>(max_order) + 1);
    const double half = 0.5 * std::abs(x);
    double lead = 1.0;  // (x/2)^n / n!
    for (int n = 0; n <= max_order; ++n) {
      if (n > 0) lead *= half / n;
      j[static_cast<std::size_t>(n)] = lead * (1.0 - half * half / (n + 1));
    }
  } else {
    j = miller_sequence(max_order, std::abs(x));
  }
  if (x < 0.0) {
    // J_n(-x) = (-1)^n J_n(x)
    for (std::size_t n = 1; n < j.size(); n += 2) j[n] = -j[n];
  }
  return j;
}

double bessel_jn(int n, double x) {
  const int order = std::abs(n);
  const double value = bessel_j_sequence(order, x)[static_cast<std::size_t>(order)];
  // J_{-n}(x) = (-1)^n J_n(x)
  return (n < 0 && order % 2 == 1) ? -value : value;
}

}  // namespace diffbeam
