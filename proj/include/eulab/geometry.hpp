#pragma once

#include <array>
#include <variant>

#include "eulab/function.hpp"

namespace eulab {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Mat3 = std::array<Vec3, 3>;

enum class Space { s3, t3 };

/// Default guard keeping chart computations away from the Hopf link.
inline constexpr double kChartGuard = 1e-6;

/// Point of the unit sphere in R⁴; z1 = x + i y, z2 = z + i xi.
struct AmbientPoint {
  double x = 0, y = 0, z = 0, xi = 0;
  double norm() const;
};

/// (theta1, theta2, rho) on S³ minus the Hopf link. Angles may be unreduced.
struct ChartPointS3 {
  double theta1 = 0, theta2 = 0, rho = 0.5;
  Vec3 coords() const { return {theta1, theta2, rho}; }
  static ChartPointS3 from(const Vec3& c) { return {c[0], c[1], c[2]}; }
};

struct ChartPointT3 {
  double x = 0, y = 0, z = 0;
  Vec3 coords() const { return {x, y, z}; }
  /// Coordinates reduced into [0, 2π).
  ChartPointT3 reduced() const;
};

/// Chart components of the Hopf fields: u1 = ∂θ1 − ∂θ2, u2 = ∂θ1 + ∂θ2.
struct HopfBasis {
  static constexpr Vec3 u1{1.0, -1.0, 0.0};
  static constexpr Vec3 u2{1.0, 1.0, 0.0};
};

/// Density of the Riemannian volume in chart coordinates: ½ on S³, 1 on T³.
constexpr double volume_density(Space s) { return s == Space::s3 ? 0.5 : 1.0; }

/// Total volume: 2π² for S³, 8π³ for T³.
double total_volume(Space s);

/// Diagonal of the induced metric at a chart point (constant on T³).
Vec3 metric_diagonal(Space s, const Vec3& p);

double reduce_angle(double a);

AmbientPoint embed(const ChartPointS3& p);
/// Tangent map of `embed`: chart vector at p → ambient R⁴ vector.
Vec4 embed_tangent(const ChartPointS3& p, const Vec3& v);
ChartPointS3 chart_of(const AmbientPoint& a, double guard = kChartGuard);

/// Ambient Hopf fields u1 = (−y, x, ξ, −z), u2 = (−y, x, −ξ, z).
Vec4 hopf_u1(const AmbientPoint& a);
Vec4 hopf_u2(const AmbientPoint& a);

/// Explicit volume-preserving diffeomorphisms used for transport checks.
class VolumePreservingDiffeo {
 public:
  enum class HopfGenerator { u1, u2 };
  struct S3Rotation {
    HopfGenerator generator = HopfGenerator::u1;
    double t = 0.0;
  };
  /// (x, y, z) ↦ (x + a(z), y + b(z), z).
  struct T3Shear {
    ScalarFunction a;
    ScalarFunction b;
  };

  static VolumePreservingDiffeo identity(Space s);
  static VolumePreservingDiffeo s3_rotation(HopfGenerator g, double t);
  static VolumePreservingDiffeo t3_shear(ScalarFunction a, ScalarFunction b);

  Space space() const { return space_; }
  const std::variant<S3Rotation, T3Shear>& kind() const { return kind_; }

  Vec3 apply(const Vec3& p) const;
  Vec3 inverse(const Vec3& p) const;
  Mat3 jacobian(const Vec3& p) const;
  double jacobian_determinant(const Vec3& p) const;
  Vec3 pushforward_vector(const Vec3& p, const Vec3& v) const;

 private:
  VolumePreservingDiffeo(Space s, std::variant<S3Rotation, T3Shear> k) : space_(s), kind_(std::move(k)) {}
  Space space_;
  std::variant<S3Rotation, T3Shear> kind_;
};

Vec3 cross(const Vec3& a, const Vec3& b);
double dot(const Vec3& a, const Vec3& b);
Vec3 mat_vec(const Mat3& m, const Vec3& v);
double det(const Mat3& m);

}  // namespace eulab
