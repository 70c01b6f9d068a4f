#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "eulab/dynamics.hpp"
#include "eulab/errors.hpp"
#include "eulab/twistmaps.hpp"

using namespace eulab;

namespace {

constexpr double kPi = std::numbers::pi;

CurlProfileS3 example_curl() {
  return curl({ScalarFunction::expression("1 + rho", "rho"), ScalarFunction::constant(0.0)});
}

// Resonant radius of the linear profile: 2π(−4c)/(2 + 4c) = 2πp/q.
double resonant_radius(int p, int q) { return -static_cast<double>(p) / (2.0 * (p + q)); }

}  // namespace

TEST(RotationNumber, RigidRotation) {
  const double frac = (std::sqrt(5.0) - 1.0) / 2.0;
  const RotationNumber r = rotation_number(rigid_rotation(2 * kPi * frac), {0.0, 0.5}, 4000);
  EXPECT_NEAR(r.value, frac, 1e-12);
  EXPECT_FALSE(r.flagged);
  EXPECT_FALSE(r.partial);
  const RotationNumber neg = rotation_number(rigid_rotation(-2 * kPi * 0.25), {0.0, 0.5}, 1000);
  EXPECT_NEAR(neg.value, 0.75, 1e-12);
  EXPECT_NEAR(neg.signed_value, -0.25, 1e-12);
}

TEST(RotationNumber, TwistMapMatchesWinding) {
  const CurlProfileS3 c = example_curl();
  const AnnulusMap m = analytic_return_map(c, 0.05, 0.95);
  const RotationNumber r = rotation_number(m, {1.0, 0.3}, 2000);
  EXPECT_NEAR(r.signed_value, c.winding(0.3) / (2 * kPi), 1e-12);
}

TEST(RotationNumber, EscapeIsPartial) {
  const AnnulusMap drift(AnnulusMap::Kind::model, [](const AnnulusPoint& x) { return AnnulusPoint{x.theta + 1.0, x.rho + 0.1}; },
                         0.0, 1.0);
  const Orbit o = iterate(drift, {0.0, 0.05}, 100);
  EXPECT_TRUE(o.escaped);
  EXPECT_EQ(o.exit_index, 10u);
  EXPECT_TRUE(rotation_number(o).partial);
  EXPECT_TRUE(rotation_number(o).flagged);
}

TEST(AreaPreservation, TwistAndHenon) {
  const AnnulusMap m = analytic_return_map(example_curl(), 0.05, 0.95);
  EXPECT_LT(area_residual(m, {0.3, 0.4}, 1e-5), 1e-8);
  const AnnulusMap h = quadratic_henon(1.3);
  EXPECT_LT(area_residual(h, {0.2, -0.1}, 1e-5), 1e-8);
  const Eigen::Matrix2d j = jacobian(h, {0.0, 0.0}, 1, 1e-6);
  EXPECT_NEAR(j.determinant(), 1.0, 1e-9);
  EXPECT_NEAR(j.trace(), 2 * std::cos(1.3), 1e-8);
}

TEST(Resonance, LinearProfileCircles) {
  const CurlProfileS3 c = example_curl();
  for (auto [p, q] : {std::pair{-1, 2}, {-2, 5}, {-1, 3}, {-3, 7}}) {
    const ResonanceResult r = find_resonance(c, 0.05, 0.95, p, q);
    ASSERT_TRUE(r.found) << p << "/" << q;
    ASSERT_EQ(r.circles.size(), 1u);
    EXPECT_NEAR(r.circles[0], resonant_radius(p, q), 1e-10);
  }
  EXPECT_NEAR(find_resonance(c, 0.05, 0.95, -1, 2).circles[0], 0.5, 1e-10);
  EXPECT_NEAR(find_resonance(c, 0.05, 0.95, -2, 5).circles[0], 1.0 / 3.0, 1e-10);
  // W/2π = −2ρ/(1 + 2ρ) stays in (−2/3, 0): positive or too large ratios miss.
  EXPECT_FALSE(find_resonance(c, 0.05, 0.95, 3, 4).found);
  EXPECT_FALSE(find_resonance(c, 0.05, 0.95, -3, 4).found);
  EXPECT_TRUE(find_resonance_unsigned(c, 0.05, 0.95, 2, 5).found);
}

TEST(Resonance, RejectsBadRationals) {
  const CurlProfileS3 c = example_curl();
  EXPECT_THROW(find_resonance(c, 0.05, 0.95, 2, 4), Error);
  EXPECT_THROW(find_resonance(c, 0.05, 0.95, 1, 0), Error);
}

TEST(Perturbation, IdentityOutsideBumpAndAreaPreserving) {
  const CurlProfileS3 c = example_curl();
  const double center = resonant_radius(-2, 5);
  const auto pert = GeneratingPerturbation::standard(1e-3, 5, center);
  const ActionCoordinate act = action_coordinate(c);
  EXPECT_NEAR(act.action(0.3), 2 * 0.3 * 1.3, 1e-14);
  EXPECT_NEAR(act.density(0.3), 3.2, 1e-13);
  const AnnulusPoint out{0.7, center + 0.2};
  const AnnulusPoint same = generating_step(pert, act, out);
  EXPECT_EQ(same.theta, out.theta);
  EXPECT_EQ(same.rho, out.rho);
  const AnnulusPoint in = generating_step(pert, act, {0.7, center});
  EXPECT_GT(std::abs(in.rho - center), 1e-6);

  const AnnulusMap m = perturb(analytic_return_map(c, 0.05, 0.95), pert, act);
  EXPECT_TRUE(m.exact());
  for (double t : {0.1, 2.0, 4.5})
    for (double r : {center - 0.05, center, center + 0.07}) EXPECT_LT(area_residual(m, {t, r}, 1e-6), 1e-8);
  EXPECT_TRUE(intersection_check(m, center).intersects);
}

TEST(Perturbation, AmplitudeGuard) {
  const CurlProfileS3 c = example_curl();
  const auto pert = GeneratingPerturbation::standard(5.0, 5, 0.4);
  EXPECT_THROW(check_amplitude(pert, action_coordinate(c)), Error);
}

TEST(PeriodicOrbits, PerturbedResonanceBreaksIntoPairs) {
  const CurlProfileS3 c = example_curl();
  const int p = -2, q = 5;
  const double center = resonant_radius(p, q);
  const auto pert = GeneratingPerturbation::standard(1e-3, q, center);
  const AnnulusMap m = perturb(analytic_return_map(c, 0.05, 0.95), pert, action_coordinate(c));
  const PeriodicSearch s = find_periodic(m, p, q, center);
  ASSERT_TRUE(s.found) << s.diagnosis;
  // One elliptic and one hyperbolic orbit of period q survive.
  ASSERT_EQ(s.orbits.size(), 2u);
  int elliptic = 0, hyperbolic = 0;
  ClassifyOptions opt;
  opt.fit_twist = false;
  for (const auto& o : s.orbits) {
    EXPECT_EQ(o.points.size(), static_cast<std::size_t>(q));
    EXPECT_LT(o.residual, 1e-9);
    EXPECT_NEAR(o.winding, 2 * kPi * p, 1e-8);
    const FixedPointClass k = classify(m, o, opt);
    EXPECT_NEAR(k.det, 1.0, 1e-6);
    if (k.elliptic()) ++elliptic;
    if (k.verdict == FixedPointVerdict::hyperbolic) ++hyperbolic;
  }
  EXPECT_EQ(elliptic, 1);
  EXPECT_EQ(hyperbolic, 1);
  EXPECT_EQ(s.fixed_point_count(), 2u * q);
}

TEST(PeriodicOrbits, UnperturbedCircleIsDegenerate) {
  const CurlProfileS3 c = example_curl();
  const PeriodicSearch s = find_periodic(analytic_return_map(c, 0.05, 0.95), -1, 2, 0.5);
  EXPECT_TRUE(s.degenerate);
}

TEST(Monodromy, StabilityVerdicts) {
  Eigen::Matrix2d rot;
  rot << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  const FixedPointClass e = classify_monodromy(rot);
  EXPECT_TRUE(e.elliptic());
  EXPECT_NEAR(std::abs(e.omega), 0.3, 1e-12);
  EXPECT_NEAR(std::abs(e.lambda), 1.0, 1e-12);

  const FixedPointClass h = classify_monodromy(Eigen::Vector2d(2.0, 0.5).asDiagonal());
  EXPECT_EQ(h.verdict, FixedPointVerdict::hyperbolic);

  Eigen::Matrix2d shear;
  shear << 1.0, 0.7, 0.0, 1.0;
  EXPECT_EQ(classify_monodromy(shear).verdict, FixedPointVerdict::parabolic);

  // Rotation by 2π/3: λ³ = 1 raises the k = 3 resonance flag.
  Eigen::Matrix2d r3;
  const double a = 2 * kPi / 3;
  r3 << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const FixedPointClass res = classify_monodromy(r3);
  EXPECT_TRUE(res.resonance[2]);
  EXPECT_EQ(res.verdict, FixedPointVerdict::elliptic_resonant);
}

TEST(TwistFit, RecoversModelTwist) {
  const double omega = 0.5, alpha = 3.0;
  const AnnulusMap m = polar_twist_model(omega, alpha);
  const TwistFit fit = twist_fit(m, {0.0, 0.0}, 1, Eigen::Matrix2d::Identity());
  ASSERT_TRUE(fit.ok) << fit.diagnosis;
  EXPECT_NEAR(fit.omega, omega, 1e-8);
  EXPECT_NEAR(fit.alpha, alpha, 1e-4);
  EXPECT_GT(std::abs(fit.alpha), 3 * fit.alpha_sigma);
}

TEST(TwistFit, HenonOriginIsNondegenerate) {
  const AnnulusMap h = quadratic_henon(1.3);
  PeriodicOrbit o;
  o.points = {{0.0, 0.0}};
  const FixedPointClass k = classify(h, o);
  EXPECT_EQ(k.verdict, FixedPointVerdict::elliptic_nondegenerate);
  EXPECT_GT(std::abs(k.alpha), 3 * k.alpha_sigma);
}
