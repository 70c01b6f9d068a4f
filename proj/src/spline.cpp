#include "eulab/spline.hpp"

#include <algorithm>
#include <cmath>

#include "eulab/errors.hpp"

namespace eulab {

namespace {

// Thomas algorithm; a is the sub-diagonal (a[0] unused), c the super-diagonal.
std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b,
                                      std::vector<double> c, std::vector<double> d) {
  const std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

// Cyclic tridiagonal system via Sherman-Morrison; alpha couples the last row
// to the first column, beta the first row to the last column.
std::vector<double> solve_cyclic(const std::vector<double>& a, const std::vector<double>& b,
                                 const std::vector<double>& c, double alpha, double beta,
                                 const std::vector<double>& d) {
  const std::size_t n = b.size();
  const double gamma = -b[0];
  std::vector<double> bb = b;
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - alpha * beta / gamma;
  auto x = solve_tridiagonal(a, bb, c, d);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  auto z = solve_tridiagonal(a, bb, c, u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> nodes, std::vector<double> values, Boundary boundary)
    : x_(std::move(nodes)), y_(std::move(values)), boundary_(boundary) {
  const std::size_t n = x_.size();
  if (n != y_.size()) throw Error(ErrorCode::validation, "spline: nodes and values differ in length");
  if (n < 3) throw Error(ErrorCode::validation, "spline: need at least 3 nodes");
  for (std::size_t i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw Error(ErrorCode::validation, "spline: nodes must increase strictly");

  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];
  m_.assign(n, 0.0);

  if (boundary_ == Boundary::natural) {
    if (n == 3) {
      const double rhs = 6.0 * ((y_[2] - y_[1]) / h[1] - (y_[1] - y_[0]) / h[0]);
      m_[1] = rhs / (2.0 * (h[0] + h[1]));
      return;
    }
    const std::size_t k = n - 2;
    std::vector<double> a(k), b(k), c(k), d(k);
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = j + 1;
      a[j] = h[i - 1];
      b[j] = 2.0 * (h[i - 1] + h[i]);
      c[j] = h[i];
      d[j] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    auto sol = solve_tridiagonal(a, b, c, d);
    for (std::size_t j = 0; j < k; ++j) m_[j + 1] = sol[j];
    return;
  }

  const double scale = std::max({1.0, std::abs(y_.front()), std::abs(y_.back())});
  if (std::abs(y_.front() - y_.back()) > 1e-12 * scale)
    throw Error(ErrorCode::validation, "periodic spline: first and last values differ");
  const std::size_t k = n - 1;  // unknowns M_0..M_{n-2}
  std::vector<double> a(k), b(k), c(k), d(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double hp = i == 0 ? h[k - 1] : h[i - 1];
    const double hn = h[i];
    const double yp = i == 0 ? y_[k - 1] : y_[i - 1];
    a[i] = hp;
    b[i] = 2.0 * (hp + hn);
    c[i] = hn;
    d[i] = 6.0 * ((y_[i + 1] - y_[i]) / hn - (y_[i] - yp) / hp);
  }
  std::vector<double> sol;
  if (k == 2) {
    // 2x2 cyclic system: both couplings fall on the same off-diagonal entry.
    const double a00 = b[0], a01 = c[0] + a[0], a10 = a[1] + c[1], a11 = b[1];
    const double det = a00 * a11 - a01 * a10;
    sol = {(d[0] * a11 - a01 * d[1]) / det, (a00 * d[1] - a10 * d[0]) / det};
  } else {
    sol = solve_cyclic(a, b, c, /*alpha=*/c[k - 1], /*beta=*/a[0], d);
  }
  for (std::size_t i = 0; i < k; ++i) m_[i] = sol[i];
  m_[n - 1] = m_[0];
}

double CubicSpline::eval(double x, int order) const {
  const double lo = x_.front(), hi = x_.back();
  if (boundary_ == Boundary::periodic) {
    const double period = hi - lo;
    x = lo + std::fmod(x - lo, period);
    if (x < lo) x += period;
  } else {
    const double slack = 1e-12 * (hi - lo);
    if (x < lo - slack || x > hi + slack)
      throw Error(ErrorCode::evaluation, "spline evaluated outside its node range");
    x = std::clamp(x, lo, hi);
  }
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i >= x_.size() - 1) i = x_.size() - 2;

  const double h = x_[i + 1] - x_[i];
  const double A = x_[i + 1] - x;
  const double B = x - x_[i];
  const double mi = m_[i], mj = m_[i + 1];
  switch (order) {
    case 0:
      return mi * A * A * A / (6 * h) + mj * B * B * B / (6 * h) + (y_[i] / h - mi * h / 6) * A +
             (y_[i + 1] / h - mj * h / 6) * B;
    case 1:
      return -mi * A * A / (2 * h) + mj * B * B / (2 * h) - (y_[i] / h - mi * h / 6) +
             (y_[i + 1] / h - mj * h / 6);
    case 2: return mi * A / h + mj * B / h;
    case 3: return (mj - mi) / h;
    default: return 0.0;
  }
}

}  // namespace eulab
