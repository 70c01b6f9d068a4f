#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eulab/errors.hpp"
#include "eulab/field.hpp"
#include "eulab/geometry.hpp"

using namespace eulab;

namespace {

constexpr double kPi = std::numbers::pi;

double dot4(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

Vec4 as_vec(const AmbientPoint& a) { return {a.x, a.y, a.z, a.xi}; }

}  // namespace

TEST(Geometry, TotalVolumes) {
  EXPECT_NEAR(total_volume(Space::s3), 2.0 * kPi * kPi, 1e-12);
  EXPECT_NEAR(total_volume(Space::t3), 8.0 * kPi * kPi * kPi, 1e-10);
  EXPECT_DOUBLE_EQ(volume_density(Space::s3), 0.5);
  EXPECT_DOUBLE_EQ(volume_density(Space::t3), 1.0);
}

TEST(Geometry, ReduceAngle) {
  EXPECT_NEAR(reduce_angle(-0.5), 2.0 * kPi - 0.5, 1e-14);
  EXPECT_NEAR(reduce_angle(7.0 * kPi), kPi, 1e-12);
  const double r = reduce_angle(2.0 * kPi);
  EXPECT_GE(r, 0.0);
  EXPECT_LT(r, 2.0 * kPi);
}

TEST(Geometry, EmbedRoundTrip) {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi), rad(0.01, 0.99);
  for (int i = 0; i < 500; ++i) {
    const ChartPointS3 p{ang(eng), ang(eng), rad(eng)};
    const AmbientPoint a = embed(p);
    EXPECT_NEAR(a.norm(), 1.0, 1e-14);
    EXPECT_NEAR(a.x * a.x + a.y * a.y, p.rho, 1e-14);
    const ChartPointS3 q = chart_of(a);
    EXPECT_NEAR(q.rho, p.rho, 1e-13);
    EXPECT_NEAR(std::remainder(q.theta1 - p.theta1, 2.0 * kPi), 0.0, 1e-12);
    EXPECT_NEAR(std::remainder(q.theta2 - p.theta2, 2.0 * kPi), 0.0, 1e-12);
  }
}

TEST(Geometry, ChartDomainErrors) {
  EXPECT_THROW(embed({0.0, 0.0, 0.0}), Error);
  EXPECT_THROW(embed({0.0, 0.0, 1.0}), Error);
  try {
    chart_of({1.0, 0.0, 0.0, 0.0});
    FAIL() << "expected a near-link error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::near_link);
  }
  try {
    chart_of({2.0, 0.0, 0.0, 0.0});
    FAIL() << "expected a chart-domain error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::chart_domain);
  }
}

TEST(Geometry, HopfFieldsMatchChartComponents) {
  const ChartPointS3 p{0.3, 1.7, 0.4};
  const AmbientPoint a = embed(p);
  const Vec4 t1 = embed_tangent(p, HopfBasis::u1);
  const Vec4 t2 = embed_tangent(p, HopfBasis::u2);
  const Vec4 h1 = hopf_u1(a), h2 = hopf_u2(a);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(t1[k], h1[k], 1e-14);
    EXPECT_NEAR(t2[k], h2[k], 1e-14);
  }
  // Unit, tangent to the sphere, orthogonal to each other only at ρ = 1/2.
  EXPECT_NEAR(dot4(h1, h1), 1.0, 1e-14);
  EXPECT_NEAR(dot4(h2, h2), 1.0, 1e-14);
  EXPECT_NEAR(dot4(h1, as_vec(a)), 0.0, 1e-14);
  EXPECT_NEAR(dot4(h1, h2), 2.0 * p.rho - 1.0, 1e-14);
}

TEST(Geometry, EmbedTangentMatchesFiniteDifference) {
  const ChartPointS3 p{1.1, 2.3, 0.35};
  const Vec3 v{0.2, -0.7, 0.3};
  const double h = 1e-6;
  const AmbientPoint ap = embed({p.theta1 + h * v[0], p.theta2 + h * v[1], p.rho + h * v[2]});
  const AmbientPoint am = embed({p.theta1 - h * v[0], p.theta2 - h * v[1], p.rho - h * v[2]});
  const Vec4 fd{(ap.x - am.x) / (2 * h), (ap.y - am.y) / (2 * h), (ap.z - am.z) / (2 * h), (ap.xi - am.xi) / (2 * h)};
  const Vec4 t = embed_tangent(p, v);
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(t[k], fd[k], 1e-8);
}

TEST(Geometry, MetricDiagonal) {
  // |∂θ1|² = ρ, |∂θ2|² = 1 − ρ, |∂ρ|² = 1/(4ρ(1−ρ)).
  const Vec3 g = metric_diagonal(Space::s3, {0.0, 0.0, 0.2});
  EXPECT_NEAR(g[0], 0.2, 1e-14);
  EXPECT_NEAR(g[1], 0.8, 1e-14);
  EXPECT_NEAR(g[2], 1.0 / (4.0 * 0.2 * 0.8), 1e-12);
  const Vec3 t = metric_diagonal(Space::t3, {1.0, 2.0, 3.0});
  EXPECT_EQ(t, (Vec3{1.0, 1.0, 1.0}));
}

TEST(Geometry, S3RotationIsTheHopfFlow) {
  const auto rot = VolumePreservingDiffeo::s3_rotation(VolumePreservingDiffeo::HopfGenerator::u1, 0.7);
  const Vec3 p{0.4, 1.2, 0.6};
  const Vec3 q = rot.apply(p);
  EXPECT_NEAR(q[0], 1.1, 1e-14);
  EXPECT_NEAR(q[1], 0.5, 1e-14);
  EXPECT_NEAR(q[2], 0.6, 1e-15);
  const Vec3 back = rot.inverse(q);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(back[k], p[k], 1e-14);
  EXPECT_NEAR(rot.jacobian_determinant(p), 1.0, 1e-14);

  const auto rot2 = VolumePreservingDiffeo::s3_rotation(VolumePreservingDiffeo::HopfGenerator::u2, -0.3);
  const Vec3 r = rot2.apply(p);
  EXPECT_NEAR(r[0], 0.1, 1e-14);
  EXPECT_NEAR(r[1], 0.9, 1e-14);
}

TEST(Geometry, T3ShearPreservesVolume) {
  const auto shear = VolumePreservingDiffeo::t3_shear(ScalarFunction::expression("sin(z)", "z"),
                                                      ScalarFunction::expression("cos(2*z)", "z"));
  EXPECT_EQ(shear.space(), Space::t3);
  std::mt19937_64 eng(11);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{ang(eng), ang(eng), ang(eng)};
    const Vec3 q = shear.apply(p);
    EXPECT_NEAR(q[0], p[0] + std::sin(p[2]), 1e-14);
    EXPECT_NEAR(q[1], p[1] + std::cos(2.0 * p[2]), 1e-14);
    EXPECT_NEAR(q[2], p[2], 0.0);
    const Vec3 b = shear.inverse(q);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(b[k], p[k], 1e-13);
    EXPECT_NEAR(shear.jacobian_determinant(p), 1.0, 1e-14);
    const Mat3 j = shear.jacobian(p);
    EXPECT_NEAR(j[0][2], std::cos(p[2]), 1e-12);
    EXPECT_NEAR(j[1][2], -2.0 * std::sin(2.0 * p[2]), 1e-12);
  }
}

TEST(Geometry, PushforwardKeepsDivergenceFree) {
  // A divergence-free field on T³ stays divergence-free after a shear.
  VectorField w{Space::t3, [](const Vec3& p) { return Vec3{std::sin(p[1]), std::cos(p[2]), std::sin(p[0])}; }};
  const auto shear = VolumePreservingDiffeo::t3_shear(ScalarFunction::expression("0.5*sin(z)", "z"),
                                                      ScalarFunction::constant(0.0));
  const VectorField v = pushforward_field(w, shear);
  for (double z : {0.1, 1.3, 2.9, 4.4}) EXPECT_NEAR(chart_divergence(v, {0.7, 2.1, z}), 0.0, 1e-9);
  // Pushforward relation at a mapped point.
  const Vec3 p{0.7, 2.1, 1.3};
  const Vec3 lhs = v(shear.apply(p));
  const Vec3 rhs = shear.pushforward_vector(p, w(p));
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(lhs[k], rhs[k], 1e-13);
}

TEST(Geometry, LieBracketOfCommutingHopfFields) {
  VectorField a{Space::s3, [](const Vec3&) { return HopfBasis::u1; }};
  VectorField b{Space::s3, [](const Vec3& p) { return Vec3{p[2], p[2], 0.0}; }};
  const Vec3 br = lie_bracket(a, b, {0.3, 0.4, 0.5});
  for (double c : br) EXPECT_NEAR(c, 0.0, 1e-9);
  VectorField radial{Space::s3, [](const Vec3&) { return Vec3{0.0, 0.0, 1.0}; }};
  const Vec3 br2 = lie_bracket(radial, b, {0.3, 0.4, 0.5});
  EXPECT_NEAR(br2[0], 1.0, 1e-8);
  EXPECT_NEAR(br2[1], 1.0, 1e-8);
}

TEST(Geometry, VectorAlgebra) {
  EXPECT_EQ(cross({1, 0, 0}, {0, 1, 0}), (Vec3{0, 0, 1}));
  EXPECT_DOUBLE_EQ(dot({1, 2, 3}, {4, 5, 6}), 32.0);
  const Mat3 m{{{2, 0, 0}, {0, 3, 0}, {1, 0, 4}}};
  EXPECT_DOUBLE_EQ(det(m), 24.0);
  EXPECT_EQ(mat_vec(m, {1, 1, 1}), (Vec3{2, 3, 5}));
}
