#include "eulab/numerics.hpp"

#include <algorithm>

namespace eulab::numerics {

double bisect(const std::function<double(double)>& fn, double a, double b, double tol) {
  double fa = fn(a);
  if (fa == 0.0) return a;
  double fb = fn(b);
  if (fb == 0.0) return b;
  for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = fn(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> sign_change_roots(const std::function<double(double)>& fn, double lo, double hi,
                                      std::size_t n, double tol, bool periodic) {
  std::vector<double> roots;
  if (n < 2) n = 2;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> xs(n), vs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? hi : lo + h * static_cast<double>(i);
    vs[i] = fn(xs[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (vs[i] == 0.0) {
      roots.push_back(xs[i]);
      continue;
    }
    if (vs[i + 1] != 0.0 && (vs[i] < 0) != (vs[i + 1] < 0)) roots.push_back(bisect(fn, xs[i], xs[i + 1], tol));
  }
  if (vs[n - 1] == 0.0 && !(periodic && !roots.empty() && roots.front() == lo)) roots.push_back(hi);
  if (periodic && !roots.empty() && roots.back() == hi && roots.front() == lo) roots.pop_back();
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [tol](double a, double b) { return std::abs(a - b) <= 10 * tol; }),
              roots.end());
  return roots;
}

double weighted_average(const std::vector<double>& values, std::size_t count) {
  count = std::min(count, values.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double w = birkhoff_weight((static_cast<double>(i) + 0.5) / static_cast<double>(count));
    num += w * values[i];
    den += w;
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace eulab::numerics
