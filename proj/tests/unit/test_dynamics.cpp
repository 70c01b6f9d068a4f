#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eulab/dynamics.hpp"
#include "eulab/errors.hpp"
#include "eulab/steady.hpp"

using namespace eulab;

namespace {

constexpr double kPi = std::numbers::pi;

CurlProfileS3 example_curl() {
  return curl({ScalarFunction::expression("1 + rho", "rho"), ScalarFunction::constant(0.0)});
}

}  // namespace

TEST(Trace, LinearFlowIsExact) {
  // The curl field is constant along each torus: θ1(t) = θ1 − 4ρt, θ2(t) = θ2 + (2 + 4ρ)t.
  const VectorField w = curl_field(example_curl());
  const Vec3 p0{0.1, 0.2, 0.3};
  const Trajectory tr = trace(w, p0, 5.0);
  ASSERT_EQ(tr.status, Trajectory::Status::ok);
  ASSERT_FALSE(tr.points.empty());
  EXPECT_NEAR(tr.times.back(), 5.0, 1e-12);
  const Vec3& e = tr.points.back();
  EXPECT_NEAR(e[0], 0.1 - 4 * 0.3 * 5.0, 1e-9);
  EXPECT_NEAR(e[1], 0.2 + (2 + 4 * 0.3) * 5.0, 1e-9);
  EXPECT_NEAR(e[2], 0.3, 1e-12);
}

TEST(Trace, HarmonicOscillatorOnT3) {
  // Rotation in the (x, z) plane: x(t) = cos t, z(t) = sin t.
  VectorField f{Space::t3, [](const Vec3& p) { return Vec3{-p[2], 0.0, p[0]}; }};
  const Trajectory tr = trace(f, {1.0, 0.0, 0.0}, 2 * kPi, {1e-12});
  EXPECT_NEAR(tr.points.back()[0], 1.0, 1e-9);
  EXPECT_NEAR(tr.points.back()[2], 0.0, 1e-9);
}

TEST(Trace, EscapeNearTheLink) {
  VectorField radial{Space::s3, [](const Vec3&) { return Vec3{0.0, 1.0, 1.0}; }};
  const Trajectory tr = trace(radial, {0.0, 0.0, 0.5}, 2.0);
  EXPECT_EQ(tr.status, Trajectory::Status::escaped);
  EXPECT_NEAR(tr.escape_time, 0.5, 1e-3);
}

TEST(ReturnMap, MatchesAnalyticTwist) {
  const CurlProfileS3 c = example_curl();
  const VectorField w = curl_field(c);
  for (double rho : {0.1, 0.4, 0.8}) {
    const ReturnResult r = return_map(w, s3_section(), 0.5, rho);
    ASSERT_TRUE(r.ok()) << r.diagnosis;
    const double g = 2 + 4 * rho, f = -4 * rho;
    EXPECT_NEAR(r.transit, 2 * kPi / g, 1e-9);
    EXPECT_NEAR(r.delta[0], 2 * kPi * f / g, 1e-8);
    EXPECT_NEAR(r.delta[1], 2 * kPi, 1e-9);
    EXPECT_NEAR(r.point[2], rho, 1e-10);
  }
}

TEST(ReturnMap, AnalyticAndNumericMapsAgree) {
  const CurlProfileS3 c = example_curl();
  const AnnulusMap exact = analytic_return_map(c, 0.05, 0.95);
  const AnnulusMap num = numeric_return_map(curl_field(c), s3_section(), 0.05, 0.95);
  EXPECT_EQ(exact.kind(), AnnulusMap::Kind::analytic);
  EXPECT_EQ(num.kind(), AnnulusMap::Kind::numeric);
  for (double t : {0.0, 1.0, 4.0})
    for (double r : {0.1, 0.5, 0.9}) {
      const AnnulusPoint a = exact({t, r}), b = num({t, r});
      EXPECT_NEAR(a.theta, b.theta, 1e-8);
      EXPECT_NEAR(a.rho, b.rho, 1e-9);
    }
  // Invariant density of the θ2 = 0 section is g.
  EXPECT_NEAR(exact.density({0.0, 0.25}), 3.0, 1e-12);
}

TEST(ReturnMap, SectionFailures) {
  // A field tangent to the section never returns.
  VectorField flat{Space::s3, [](const Vec3&) { return Vec3{1.0, 0.0, 0.0}; }};
  const ReturnResult r = return_map(flat, s3_section(), 0.0, 0.5);
  EXPECT_FALSE(r.ok());
  EXPECT_NE(r.status, ReturnResult::Status::ok);

  // f1 = 0, f2 = ρ − 1 gives g = 2(ρ f2)′ = 4ρ − 2, which changes sign at ρ = 1/2.
  const CurlProfileS3 bad = curl({ScalarFunction::constant(0.0), ScalarFunction::expression("rho - 1", "rho")});
  EXPECT_NEAR(bad.g(0.5), 0.0, 1e-14);
  EXPECT_THROW(analytic_return_map(bad, 0.05, 0.95), Error);
  EXPECT_NO_THROW(analytic_return_map(bad, 0.6, 0.95));
}

TEST(ReturnMap, T3Sections) {
  VectorField f{Space::t3, [](const Vec3& p) { return Vec3{1.0, 0.5 + 0.1 * std::sin(p[2]), 0.0}; }};
  const ReturnResult r = return_map(f, t3_x_section(), 0.3, 1.0);
  ASSERT_TRUE(r.ok()) << r.diagnosis;
  EXPECT_NEAR(r.transit, 2 * kPi, 1e-9);
  EXPECT_NEAR(r.delta[1], 2 * kPi * (0.5 + 0.1 * std::sin(1.0)), 1e-8);
  EXPECT_EQ(t3_y_section().section_axis, 1);
  EXPECT_EQ(t3_x_section().section_axis, 0);
}
