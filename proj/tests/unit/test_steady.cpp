#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "eulab/errors.hpp"
#include "eulab/function.hpp"
#include "eulab/spline.hpp"
#include "eulab/steady.hpp"

using namespace eulab;

namespace {

constexpr double kPi = std::numbers::pi;

ShearProfileS3 linear_profile() {
  return {ScalarFunction::expression("1 + rho", "rho"), ScalarFunction::constant(0.0)};
}

}  // namespace

TEST(ScalarFunction, ExpressionDerivatives) {
  const auto f = ScalarFunction::expression("exp(2*x) + x^3 - sin(x)", "x");
  const double x = 0.37;
  EXPECT_NEAR(f(x), std::exp(2 * x) + x * x * x - std::sin(x), 1e-14);
  EXPECT_NEAR(f.eval(x, 1), 2 * std::exp(2 * x) + 3 * x * x - std::cos(x), 1e-13);
  EXPECT_NEAR(f.eval(x, 2), 4 * std::exp(2 * x) + 6 * x + std::sin(x), 1e-12);
  EXPECT_NEAR(f.eval(x, 3), 8 * std::exp(2 * x) + 6 + std::cos(x), 1e-12);
  EXPECT_FALSE(f.is_spline());
}

TEST(ScalarFunction, RejectsMalformedExpressions) {
  EXPECT_THROW(ScalarFunction::expression("1 + ", "rho"), Error);
  EXPECT_THROW(ScalarFunction::expression("1 + z", "rho"), Error);
  EXPECT_THROW(ScalarFunction::expression("foo(rho)", "rho"), Error);
}

TEST(CubicSpline, ReproducesCubicsAwayFromEnds) {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    x.push_back(i / 40.0);
    y.push_back(std::sin(3.0 * x.back()));
  }
  const CubicSpline s(x, y);
  for (double t : {0.3, 0.51, 0.77}) {
    EXPECT_NEAR(s.eval(t), std::sin(3 * t), 1e-6);
    EXPECT_NEAR(s.eval(t, 1), 3 * std::cos(3 * t), 1e-4);
  }
  EXPECT_THROW(s.eval(1.5), Error);
}

TEST(CubicSpline, PeriodicWrapsAround) {
  std::vector<double> x, y;
  const int n = 64;
  for (int i = 0; i <= n; ++i) {
    x.push_back(2 * kPi * i / n);
    y.push_back(std::cos(x.back()));
  }
  y.back() = y.front();
  const CubicSpline s(x, y, CubicSpline::Boundary::periodic);
  EXPECT_NEAR(s.eval(2 * kPi + 0.4), std::cos(0.4), 1e-5);
  EXPECT_NEAR(s.eval(-0.4), std::cos(0.4), 1e-5);
  EXPECT_NEAR(s.eval(0.0, 1), 0.0, 1e-4);
  y.back() = 2.0;
  EXPECT_THROW(CubicSpline(x, y, CubicSpline::Boundary::periodic), Error);
}

TEST(CubicSpline, RejectsBadNodes) {
  EXPECT_THROW(CubicSpline({0.0, 0.5, 0.5, 1.0}, {0, 1, 2, 3}), Error);
  EXPECT_THROW(CubicSpline({0.0, 1.0}, {0.0}), Error);
}

TEST(Curl, LinearProfile) {
  // f1 = 1 + ρ, f2 = 0: rot u = −4ρ ∂θ1 + (2 + 4ρ) ∂θ2.
  const CurlProfileS3 c = curl(linear_profile());
  for (double r : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    EXPECT_NEAR(c.f(r), -4 * r, 1e-12);
    EXPECT_NEAR(c.g(r), 2 + 4 * r, 1e-12);
    EXPECT_NEAR(c.action(r), 2 * r * (1 + r), 1e-12);
    EXPECT_NEAR(c.winding(r), 2 * kPi * (-4 * r) / (2 + 4 * r), 1e-12);
  }
  // d/dρ of 2π f/g is 2π (f′g − fg′)/g² = −16π/g².
  EXPECT_NEAR(c.winding_derivative(0.3), -16 * kPi / std::pow(3.2, 2), 1e-10);
}

TEST(Curl, HopfFieldsAreEigenfields) {
  const CurlProfileS3 c1 = curl({ScalarFunction::constant(1.0), ScalarFunction::constant(0.0)});
  const CurlProfileS3 c2 = curl({ScalarFunction::constant(0.0), ScalarFunction::constant(1.0)});
  for (double r : {0.05, 0.5, 0.95}) {
    EXPECT_NEAR(c1.f(r), -2.0, 1e-13);
    EXPECT_NEAR(c1.g(r), 2.0, 1e-13);
    EXPECT_NEAR(c2.f(r), 2.0, 1e-13);
    EXPECT_NEAR(c2.g(r), 2.0, 1e-13);
  }
}

TEST(Curl, DualFormAgreesForNonlinearProfile) {
  const ShearProfileS3 prof{ScalarFunction::expression("cos(3*rho)", "rho"),
                            ScalarFunction::expression("rho^2 - 0.5*exp(rho)", "rho")};
  const CurlProfileS3 c = curl(prof);
  for (double r : {0.1, 0.33, 0.6, 0.87}) {
    const Vec3 d = curl_via_dual_form(prof, r);
    EXPECT_NEAR(d[0], c.f(r), 1e-9);
    EXPECT_NEAR(d[1], c.g(r), 1e-9);
    EXPECT_NEAR(d[2], 0.0, 1e-9);
  }
}

TEST(Curl, T3Components) {
  const ShearProfileT3 prof{ScalarFunction::expression("2*cos(z)", "z"), ScalarFunction::expression("sin(z)", "z")};
  const CurlProfileT3 c = curl_t3(prof);
  for (double z : {0.0, 1.0, 4.0}) {
    EXPECT_NEAR(c.F(z), -std::cos(z), 1e-13);
    EXPECT_NEAR(c.G(z), -2 * std::sin(z), 1e-13);
  }
}

TEST(Bernoulli, LinearProfileClosedForm) {
  const BernoulliProfile b = bernoulli(linear_profile());
  for (double r : {0.0, 0.25, 0.5, 1.0}) EXPECT_NEAR(b.value(r), r + 0.5 * r * r, 1e-10);
  EXPECT_NEAR(b.derivative(0.4), 1.4, 1e-10);
  EXPECT_NEAR(b.second_derivative(0.4), 1.0, 1e-7);
  EXPECT_NEAR(bernoulli_integrand(linear_profile(), 0.4), 1.4, 1e-12);
}

TEST(Bernoulli, T3KineticEnergy) {
  const ShearProfileT3 prof{ScalarFunction::expression("2*cos(z)", "z"), ScalarFunction::expression("sin(z)", "z")};
  const BernoulliProfile b = bernoulli_t3(prof);
  for (double z : {0.0, 0.7, 2.5}) {
    const double raw = 0.5 * (4 * std::cos(z) * std::cos(z) + std::sin(z) * std::sin(z));
    EXPECT_NEAR(b.value(z), raw - 2.0, 1e-13);
  }
  EXPECT_NEAR(b.offset(), 2.0, 1e-14);
}

TEST(Bernoulli, IdentityHoldsOnRandomPoints) {
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), rad(0.01, 0.99);
  std::vector<ChartPointS3> pts(200);
  for (auto& p : pts) p = {ang(eng), ang(eng), rad(eng)};
  const ShearProfileS3 prof{ScalarFunction::expression("sin(2*rho) + 1", "rho"),
                            ScalarFunction::expression("rho^3", "rho")};
  EXPECT_LT(bernoulli_identity_residual(prof, pts), 1e-8);

  std::vector<Vec3> tp(200);
  for (auto& p : tp) p = {ang(eng), ang(eng), ang(eng)};
  const ShearProfileT3 tprof{ScalarFunction::expression("cos(2*z)", "z"), ScalarFunction::expression("sin(z)", "z")};
  EXPECT_LT(bernoulli_identity_residual_t3(tprof, tp), 1e-10);
}

TEST(Nondegeneracy, LinearProfileCertifiesTwist) {
  const NondegeneracyReport rep = check_nondegenerate_s3(linear_profile(), 7.9);
  EXPECT_TRUE(rep.nondegenerate) << rep.diagnosis;
  EXPECT_GE(rep.tau, 7.9);
  EXPECT_LE(rep.tau, 8.0 + 1e-9);
  EXPECT_NEAR(rep.twist_min, 8.0, 1e-6);
  EXPECT_EQ(rep.morse_bott, MorseBottVerdict::ok);
}

TEST(Nondegeneracy, RequestAboveTwistFails) {
  const NondegeneracyReport rep = check_nondegenerate_s3(linear_profile(), 8.5);
  EXPECT_FALSE(rep.nondegenerate);
  EXPECT_FALSE(rep.diagnosis.empty());
}

TEST(Nondegeneracy, HopfFieldHasNoTwist) {
  const NondegeneracyReport rep =
      check_nondegenerate_s3({ScalarFunction::constant(1.0), ScalarFunction::constant(0.0)}, 0.1);
  EXPECT_FALSE(rep.nondegenerate);
  EXPECT_NEAR(rep.twist_min, 0.0, 1e-12);
}

TEST(Nondegeneracy, T3Profile) {
  const ShearProfileT3 prof{ScalarFunction::expression("2*cos(z)", "z"), ScalarFunction::expression("sin(z)", "z")};
  const NondegeneracyReport rep = check_nondegenerate_t3(prof, 0.5);
  EXPECT_EQ(rep.morse_bott, MorseBottVerdict::ok);
  EXPECT_FALSE(rep.critical.empty());
  EXPECT_FALSE(rep.omega_tau.empty());
}

TEST(Profiles, T3PeriodicityValidated) {
  EXPECT_NO_THROW(validate_periodic({ScalarFunction::expression("cos(z)", "z"), ScalarFunction::constant(1.0)}));
  EXPECT_THROW(validate_periodic({ScalarFunction::expression("z", "z"), ScalarFunction::constant(1.0)}), Error);
}

TEST(Fields, ShearAndCurlFieldComponents) {
  const ShearProfileS3 prof = linear_profile();
  const VectorField u = shear_field(prof);
  const Vec3 v = u({0.2, 0.3, 0.5});
  // u = (1 + ρ)(∂θ1 − ∂θ2).
  EXPECT_NEAR(v[0], 1.5, 1e-14);
  EXPECT_NEAR(v[1], -1.5, 1e-14);
  EXPECT_NEAR(v[2], 0.0, 0.0);
  const VectorField w = curl_field(curl(prof));
  const Vec3 cw = w({0.2, 0.3, 0.5});
  EXPECT_NEAR(cw[0], -2.0, 1e-12);
  EXPECT_NEAR(cw[1], 4.0, 1e-12);
  EXPECT_NEAR(chart_divergence(w, {0.2, 0.3, 0.5}), 0.0, 1e-10);
}
