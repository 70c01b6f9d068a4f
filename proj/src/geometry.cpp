#include "eulab/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "eulab/errors.hpp"

namespace eulab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double AmbientPoint::norm() const { return std::sqrt(x * x + y * y + z * z + xi * xi); }

double reduce_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

ChartPointT3 ChartPointT3::reduced() const { return {reduce_angle(x), reduce_angle(y), reduce_angle(z)}; }

double total_volume(Space s) {
  constexpr double pi = std::numbers::pi;
  return s == Space::s3 ? 2.0 * pi * pi : 8.0 * pi * pi * pi;
}

Vec3 metric_diagonal(Space s, const Vec3& p) {
  if (s == Space::t3) return {1.0, 1.0, 1.0};
  const double rho = p[2];
  return {rho, 1.0 - rho, 1.0 / (4.0 * rho * (1.0 - rho))};
}

AmbientPoint embed(const ChartPointS3& p) {
  if (!(p.rho > 0.0 && p.rho < 1.0)) {
    std::ostringstream os;
    os << "rho = " << p.rho << " outside the chart domain (0, 1)";
    throw Error(ErrorCode::chart_domain, os.str());
  }
  const double r1 = std::sqrt(p.rho), r2 = std::sqrt(1.0 - p.rho);
  return {r1 * std::cos(p.theta1), r1 * std::sin(p.theta1), r2 * std::cos(p.theta2),
          r2 * std::sin(p.theta2)};
}

Vec4 embed_tangent(const ChartPointS3& p, const Vec3& v) {
  const AmbientPoint a = embed(p);
  // ∂θ1 = (−y, x, 0, 0), ∂θ2 = (0, 0, −ξ, z), ∂ρ = (x/2ρ, y/2ρ, −z/2(1−ρ), −ξ/2(1−ρ)).
  const double s1 = 0.5 / p.rho, s2 = -0.5 / (1.0 - p.rho);
  return {-a.y * v[0] + a.x * s1 * v[2], a.x * v[0] + a.y * s1 * v[2], -a.xi * v[1] + a.z * s2 * v[2],
          a.z * v[1] + a.xi * s2 * v[2]};
}

ChartPointS3 chart_of(const AmbientPoint& a, double guard) {
  if (std::abs(a.norm() - 1.0) > 1e-10)
    throw Error(ErrorCode::chart_domain, "point is not on the unit sphere");
  const double rho = a.x * a.x + a.y * a.y;
  if (rho < guard || rho > 1.0 - guard) {
    std::ostringstream os;
    os << "point within " << guard << " of the Hopf link (rho = " << rho << ")";
    throw Error(ErrorCode::near_link, os.str());
  }
  return {reduce_angle(std::atan2(a.y, a.x)), reduce_angle(std::atan2(a.xi, a.z)), rho};
}

Vec4 hopf_u1(const AmbientPoint& a) { return {-a.y, a.x, a.xi, -a.z}; }
Vec4 hopf_u2(const AmbientPoint& a) { return {-a.y, a.x, -a.xi, a.z}; }

VolumePreservingDiffeo VolumePreservingDiffeo::identity(Space s) {
  if (s == Space::s3) return s3_rotation(HopfGenerator::u1, 0.0);
  return t3_shear(ScalarFunction::constant(0.0), ScalarFunction::constant(0.0));
}

VolumePreservingDiffeo VolumePreservingDiffeo::s3_rotation(HopfGenerator g, double t) {
  return VolumePreservingDiffeo(Space::s3, S3Rotation{g, t});
}

VolumePreservingDiffeo VolumePreservingDiffeo::t3_shear(ScalarFunction a, ScalarFunction b) {
  return VolumePreservingDiffeo(Space::t3, T3Shear{std::move(a), std::move(b)});
}

Vec3 VolumePreservingDiffeo::apply(const Vec3& p) const {
  if (const auto* r = std::get_if<S3Rotation>(&kind_)) {
    const Vec3& u = r->generator == HopfGenerator::u1 ? HopfBasis::u1 : HopfBasis::u2;
    return {p[0] + r->t * u[0], p[1] + r->t * u[1], p[2]};
  }
  const auto& s = std::get<T3Shear>(kind_);
  return {p[0] + s.a(p[2]), p[1] + s.b(p[2]), p[2]};
}

Vec3 VolumePreservingDiffeo::inverse(const Vec3& p) const {
  if (const auto* r = std::get_if<S3Rotation>(&kind_)) {
    const Vec3& u = r->generator == HopfGenerator::u1 ? HopfBasis::u1 : HopfBasis::u2;
    return {p[0] - r->t * u[0], p[1] - r->t * u[1], p[2]};
  }
  const auto& s = std::get<T3Shear>(kind_);
  return {p[0] - s.a(p[2]), p[1] - s.b(p[2]), p[2]};
}

Mat3 VolumePreservingDiffeo::jacobian(const Vec3& p) const {
  Mat3 j{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  if (const auto* s = std::get_if<T3Shear>(&kind_)) {
    j[0][2] = s->a.eval(p[2], 1);
    j[1][2] = s->b.eval(p[2], 1);
  }
  return j;
}

double VolumePreservingDiffeo::jacobian_determinant(const Vec3& p) const { return det(jacobian(p)); }

Vec3 VolumePreservingDiffeo::pushforward_vector(const Vec3& p, const Vec3& v) const {
  return mat_vec(jacobian(p), v);
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 mat_vec(const Mat3& m, const Vec3& v) { return {dot(m[0], v), dot(m[1], v), dot(m[2], v)}; }

double det(const Mat3& m) { return dot(m[0], cross(m[1], m[2])); }

}  // namespace eulab
