#include "eulab/annulus_map.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eulab/numerics.hpp"

namespace eulab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

AnnulusPoint nan_point() {
  const double n = std::numeric_limits<double>::quiet_NaN();
  return {n, n};
}
}  // namespace

AnnulusMap::AnnulusMap(Kind kind, Step step, double lower, double upper, Density density)
    : kind_(kind), step_(std::move(step)), lower_(lower), upper_(upper), density_(std::move(density)) {}

double AnnulusMap::scale() const {
  const double w = upper_ - lower_;
  return std::isfinite(w) ? w : 1.0;
}

AnnulusPoint AnnulusMap::power(const AnnulusPoint& x, int q) const {
  AnnulusPoint y = x;
  for (int i = 0; i < q; ++i) {
    y = step_(y);
    if (!contains(y)) return nan_point();
  }
  return y;
}

AnnulusMap rigid_rotation(double angle, double lower, double upper) {
  return AnnulusMap(
      AnnulusMap::Kind::analytic, [angle](const AnnulusPoint& x) { return AnnulusPoint{x.theta + angle, x.rho}; },
      lower, upper);
}

AnnulusMap twist_map(std::function<double(double)> winding, double lower, double upper,
                     AnnulusMap::Density density) {
  return AnnulusMap(
      AnnulusMap::Kind::analytic,
      [w = std::move(winding)](const AnnulusPoint& x) { return AnnulusPoint{x.theta + w(x.rho), x.rho}; }, lower,
      upper, std::move(density));
}

AnnulusMap planar_map(std::function<Eigen::Vector2d(const Eigen::Vector2d&)> fn) {
  return AnnulusMap(
      AnnulusMap::Kind::model,
      [fn = std::move(fn)](const AnnulusPoint& x) {
        const Eigen::Vector2d y = fn(Eigen::Vector2d(x.theta, x.rho));
        return AnnulusPoint{y[0], y[1]};
      },
      -kUnbounded, kUnbounded);
}

AnnulusMap polar_twist_model(double omega, double alpha) {
  return planar_map([omega, alpha](const Eigen::Vector2d& p) {
    const double a = omega + alpha * p.squaredNorm();
    const double c = std::cos(a), s = std::sin(a);
    return Eigen::Vector2d(c * p[0] - s * p[1], s * p[0] + c * p[1]);
  });
}

AnnulusMap quadratic_henon(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return planar_map([c, s](const Eigen::Vector2d& p) {
    const double x = p[0], y = p[1] - p[0] * p[0];
    return Eigen::Vector2d(c * x - s * y, s * x + c * y);
  });
}

Orbit iterate(const AnnulusMap& map, const AnnulusPoint& x, std::size_t n) {
  Orbit o;
  o.points.reserve(n + 1);
  o.points.push_back(x);
  AnnulusPoint y = x;
  for (std::size_t i = 1; i <= n; ++i) {
    y = map(y);
    if (!map.contains(y)) {
      o.escaped = true;
      o.exit_index = i;
      break;
    }
    o.points.push_back(y);
  }
  return o;
}

RotationNumber rotation_number_of_increments(const std::vector<double>& increments, double flag_threshold) {
  RotationNumber r;
  const std::size_t n = increments.size();
  r.iterations = n;
  if (n < 2) return r;
  const double full = numerics::weighted_average(increments, n) / kTwoPi;
  const double half = numerics::weighted_average(increments, n / 2) / kTwoPi;
  r.signed_value = full;
  r.value = full - std::floor(full);
  if (r.value >= 1.0) r.value = 0.0;
  r.confidence = std::abs(full - half);
  r.flagged = !(r.confidence <= flag_threshold);
  return r;
}

RotationNumber rotation_number(const Orbit& orbit, double flag_threshold) {
  std::vector<double> inc(orbit.steps());
  for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = orbit.points[i + 1].theta - orbit.points[i].theta;
  RotationNumber r = rotation_number_of_increments(inc, flag_threshold);
  r.partial = orbit.escaped;
  r.flagged = r.flagged || r.partial;
  return r;
}

RotationNumber rotation_number(const AnnulusMap& map, const AnnulusPoint& x, std::size_t n,
                               double flag_threshold) {
  return rotation_number(iterate(map, x, n), flag_threshold);
}

Eigen::Matrix2d jacobian(const AnnulusMap& map, const AnnulusPoint& x, int q, double h) {
  Eigen::Matrix2d j;
  const AnnulusPoint tp = map.power({x.theta + h, x.rho}, q), tm = map.power({x.theta - h, x.rho}, q);
  const AnnulusPoint rp = map.power({x.theta, x.rho + h}, q), rm = map.power({x.theta, x.rho - h}, q);
  j(0, 0) = (tp.theta - tm.theta) / (2 * h);
  j(1, 0) = (tp.rho - tm.rho) / (2 * h);
  j(0, 1) = (rp.theta - rm.theta) / (2 * h);
  j(1, 1) = (rp.rho - rm.rho) / (2 * h);
  return j;
}

double area_residual(const AnnulusMap& map, const AnnulusPoint& x, double h) {
  const Eigen::Matrix2d j = jacobian(map, x, 1, h);
  const AnnulusPoint y = map(x);
  return std::abs(j.determinant() * map.density(y) / map.density(x) - 1.0);
}

IntersectionCheck intersection_check(const AnnulusMap& map, double rho, std::size_t n) {
  IntersectionCheck c;
  c.min_displacement = std::numeric_limits<double>::infinity();
  c.max_displacement = -c.min_displacement;
  for (std::size_t i = 0; i < n; ++i) {
    const AnnulusPoint y = map({kTwoPi * static_cast<double>(i) / static_cast<double>(n), rho});
    const double d = y.rho - rho;
    c.min_displacement = std::min(c.min_displacement, d);
    c.max_displacement = std::max(c.max_displacement, d);
  }
  c.intersects = c.min_displacement <= 0.0 && c.max_displacement >= 0.0;
  return c;
}

}  // namespace eulab
