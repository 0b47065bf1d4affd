#pragma once

#include <vector>

namespace diffbeam {

// Bessel function of the first kind J_n(x) for integer order |n| <= 64.
// Absolute accuracy better than 1e-12 for finite x.
double bessel_jn(int n, double x);

// J_0(x) .. J_max_order(x) from a single recurrence sweep.
std::vector<double> bessel_j_sequence(int max_order, double x);

}  // namespace diffbeam
