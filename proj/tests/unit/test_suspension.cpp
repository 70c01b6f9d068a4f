#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "eulab/errors.hpp"
#include "eulab/suspension.hpp"

using namespace eulab;

namespace {

constexpr double kPi = std::numbers::pi;

CurlProfileS3 example_curl() {
  return curl({ScalarFunction::expression("1 + rho", "rho"), ScalarFunction::constant(0.0)});
}

SuspendedField example_field(double eps) {
  return suspend(example_curl(), GeneratingPerturbation::standard(eps, 5, 1.0 / 3.0), 0.05, 0.95);
}

}  // namespace

TEST(TemporalBump, UnitMassAndSupport) {
  const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      temporal_bump, kPi / 2, 3 * kPi / 2, 10, 1e-14);
  EXPECT_NEAR(mass, 1.0, 1e-13);
  EXPECT_EQ(temporal_bump(0.1), 0.0);
  EXPECT_EQ(temporal_bump(kPi / 2), 0.0);
  EXPECT_EQ(temporal_bump(5.0), 0.0);
  EXPECT_NEAR(temporal_bump(kPi), 693.0 / (256.0 * kPi), 1e-15);
  EXPECT_EQ(temporal_bump_integral(0.3), 0.0);
  EXPECT_NEAR(temporal_bump_integral(kPi), 0.5, 1e-15);
  EXPECT_NEAR(temporal_bump_integral(2 * kPi), 1.0, 1e-15);
}

TEST(TemporalBump, IntegralDerivativeIsBump) {
  for (double t : {1.7, 2.4, 3.1, 4.0, 4.6}) {
    const double h = 1e-5;
    const double fd = (temporal_bump_integral(t + h) - temporal_bump_integral(t - h)) / (2 * h);
    EXPECT_NEAR(fd, temporal_bump(t), 1e-9);
    const double part = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(temporal_bump, kPi / 2, t, 10,
                                                                                       1e-14);
    EXPECT_NEAR(temporal_bump_integral(t), part, 1e-13);
  }
}

TEST(SuspendedField, DivergenceFreeAndBaseOutsideSupport) {
  const SuspendedField w = example_field(1e-2);
  std::mt19937_64 eng(9);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), rad(0.05, 0.95), near(1.0 / 3.0 - 0.1, 1.0 / 3.0 + 0.1);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const Vec3 p{ang(eng), ang(eng), i % 2 ? near(eng) : rad(eng)};
    worst = std::max(worst, std::abs(w.divergence(p)));
  }
  EXPECT_LT(worst, 1e-12);
  // Outside the temporal or radial support the field is the base field exactly.
  for (const Vec3& p : {Vec3{0.4, 0.3, 0.33}, Vec3{1.0, 2.0, 0.6}, Vec3{2.0, 5.5, 0.3}}) {
    EXPECT_FALSE(w.perturbed_at(p));
    const Vec3 a = w(p), b = w.base(p);
    for (int k = 0; k < 3; ++k) EXPECT_EQ(a[k], b[k]);
  }
  const Vec3 inside{0.4, kPi, 1.0 / 3.0};
  EXPECT_TRUE(w.perturbed_at(inside));
  EXPECT_GT(std::abs(w(inside)[2]), 0.0);
  // θ2-speed is kept equal to g.
  EXPECT_NEAR(w(inside)[1], 2 + 4.0 / 3.0, 1e-14);
  // The finite-difference divergence agrees.
  EXPECT_NEAR(chart_divergence(w.field(), inside, 1e-4), 0.0, 1e-8);
}

TEST(SuspendedField, ReturnMapMatchesTarget) {
  const double tol = 1e-10;
  for (double eps : {1e-4, 1e-3}) {
    const SuspendedField w = example_field(eps);
    SuspensionCheckOptions opt;
    opt.n_theta = 8;
    opt.n_rho = 8;
    opt.ret.integrator.tol = tol;
    const SuspensionReport rep = verify_suspension(w, w.target_map(0.05, 0.95), opt);
    EXPECT_EQ(rep.cells, 64u);
    EXPECT_TRUE(rep.flagged.empty());
    EXPECT_LT(rep.sup, std::max(10 * tol, 1e-6 * eps)) << "eps=" << eps;
    EXPECT_GT(rep.map_deviation, 0.0);
  }
}

TEST(SuspendedField, RejectsSupportTouchingBoundary) {
  const CurlProfileS3 c = example_curl();
  EXPECT_THROW(suspend(c, GeneratingPerturbation::standard(1e-3, 5, 0.1), 0.05, 0.95), Error);
  EXPECT_THROW(suspend(c, GeneratingPerturbation::standard(10.0, 5, 0.5), 0.05, 0.95), Error);
}

TEST(SuspendedField, TransversalityFloor) {
  const SuspendedField w = example_field(1e-3);
  EXPECT_NEAR(w.transversality_floor(0.05, 0.95), 2.2, 1e-9);
}
