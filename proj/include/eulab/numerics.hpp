#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace eulab::numerics {

/// Bisection on a bracketing interval [a, b] until the bracket is below
/// `tol` (absolute).
double bisect(const std::function<double(double)>& fn, double a, double b, double tol = 1e-13);

/// All roots of `fn` on [lo, hi] found by sign changes on an n-point grid
/// followed by bisection. Exact zeros at nodes are reported once. With
/// `periodic`, the segment closing the period is examined as well.
std::vector<double> sign_change_roots(const std::function<double(double)>& fn, double lo, double hi,
                                      std::size_t n, double tol = 1e-13, bool periodic = false);

/// Weight of the smooth-window Birkhoff average, w(t) = exp(−1/(t(1−t))).
inline double birkhoff_weight(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return std::exp(-1.0 / (t * (1.0 - t)));
}

/// Weighted Birkhoff average of a sequence.
double weighted_average(const std::vector<double>& values, std::size_t count);

}  // namespace eulab::numerics
