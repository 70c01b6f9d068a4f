#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eulab/dynamics.hpp"
#include "eulab/kam.hpp"

using namespace eulab;

namespace {

constexpr double kPi = std::numbers::pi;

CurlProfileS3 example_curl() {
  return curl({ScalarFunction::expression("1 + rho", "rho"), ScalarFunction::constant(0.0)});
}

KappaOptions small_grid(std::size_t threads = 1) {
  KappaOptions o;
  o.grid = {12, 12, true};
  o.iterations = 2000;
  o.seed = 42;
  o.threads = threads;
  return o;
}

}  // namespace

TEST(KnotClass, ExampleTags) {
  EXPECT_EQ(knot_class(-4 * kPi, 5).tag(), "torus-knot(2,5)");
  EXPECT_EQ(knot_class(2 * kPi, 1).kind, IsotopyClass::Kind::unknot);
  EXPECT_EQ(knot_class(-2 * kPi, 2).kind, IsotopyClass::Kind::unknot);
  EXPECT_EQ(knot_class(6 * kPi + 0.01, 7), (IsotopyClass{IsotopyClass::Kind::torus_knot, 3, 7}));
  // Swapped roles normalize to p < q.
  EXPECT_EQ(knot_class_pq(5, 2), (IsotopyClass{IsotopyClass::Kind::torus_knot, 2, 5}));
  EXPECT_EQ(knot_class_pq(2, 4).kind, IsotopyClass::Kind::other);
  EXPECT_EQ(knot_class_pq(0, 3).kind, IsotopyClass::Kind::unknot);
  EXPECT_TRUE(knot_class_pq(-2, 5).nontrivial());
  EXPECT_FALSE(knot_class_pq(1, 5).nontrivial());
}

TEST(RationalLock, Convergents) {
  const auto r = rational_lock(0.4, 1e-12, 100);
  ASSERT_TRUE(r);
  EXPECT_EQ(r->first, 2);
  EXPECT_EQ(r->second, 5);
  const auto neg = rational_lock(-1.0 / 3.0, 1e-12, 100);
  ASSERT_TRUE(neg);
  EXPECT_EQ(neg->first, -1);
  EXPECT_EQ(neg->second, 3);
  EXPECT_FALSE(rational_lock(std::sqrt(2.0) - 1.0, 1e-12, 1000));
  EXPECT_TRUE(rational_lock(355.0 / 113.0, 1e-12, 200));
}

TEST(TrigFit, SmoothGraphFitsAndScatterDoesNot) {
  std::mt19937_64 eng(5);
  std::uniform_real_distribution<double> ang(0, 2 * kPi), u(0, 1);
  std::vector<double> a(2000), smooth(2000), noisy(2000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = ang(eng);
    smooth[i] = 0.5 + 0.1 * std::sin(a[i]) + 0.02 * std::cos(3 * a[i]);
    noisy[i] = u(eng);
  }
  EXPECT_LT(trig_fit_residual(a, smooth, 8, 256), 1e-10);
  EXPECT_GT(trig_fit_residual(a, noisy, 8, 256), 0.1);
  // All points in a narrow arc: the fit cannot resolve the gap.
  std::vector<double> arc(100), vals(100, 0.5);
  for (std::size_t i = 0; i < arc.size(); ++i) arc[i] = 0.01 * static_cast<double>(i);
  EXPECT_TRUE(std::isinf(trig_fit_residual(arc, vals, 8, 64)));
}

TEST(TrigFit, ArcFitHandlesClusteredCurves) {
  // Five short arcs of a smooth graph, as left by an orbit near a 2/5 resonance.
  std::vector<double> a, graph, la, loops;
  for (int arc = 0; arc < 5; ++arc)
    for (int i = 0; i < 200; ++i) {
      const double s = 0.3 * i / 199.0;
      const double t = 2 * kPi * arc / 5 + s - 0.1;
      a.push_back(t);
      graph.push_back(0.3 + 0.01 * std::sin(t) + 0.002 * std::cos(5 * t));
      // Island-like closed loops of radius 0.01 around each arc centre.
      const double phi = 2 * kPi * i / 200.0;
      la.push_back(2 * kPi * arc / 5 + 0.01 * std::cos(phi));
      loops.push_back(0.3 + 0.01 * std::sin(phi));
    }
  EXPECT_TRUE(std::isinf(trig_fit_residual(a, graph, 32, 512)));
  EXPECT_LT(arc_fit_residual(a, graph, 2 * kPi / 65, 8), 1e-9);
  EXPECT_GT(arc_fit_residual(la, loops, 2 * kPi / 65, 8), 1e-3);
  // An arc straddling θ = 0 is stitched across the wrap.
  std::vector<double> w, wv;
  for (int i = 0; i < 100; ++i) {
    w.push_back(-0.2 + 0.4 * i / 99.0);
    wv.push_back(std::cos(w.back()));
  }
  EXPECT_LT(arc_fit_residual(w, wv, 0.1, 8), 1e-8);
  EXPECT_TRUE(std::isinf(arc_fit_residual({0.0, 1.0}, {0.0, 0.0}, 0.1, 8)));
}

TEST(OrbitClassify, InvariantCurvesOfTwistMap) {
  const AnnulusMap m = analytic_return_map(example_curl(), 0.05, 0.95);
  // W/2π = −2ρ/(1 + 2ρ) is rational for rational ρ; take an irrational radius.
  const OrbitClass irr = classify_orbit(m, {0.3, std::sqrt(0.17)}, 10000);
  EXPECT_EQ(irr.verdict, OrbitVerdict::invariant_curve);
  EXPECT_LT(irr.fit_residual, 1e-10);
  EXPECT_FALSE(irr.rational);
  // W/2π = −2/5 at ρ = 1/3.
  const OrbitClass res = classify_orbit(m, {0.3, 1.0 / 3.0}, 10000);
  EXPECT_EQ(res.verdict, OrbitVerdict::invariant_curve);
  EXPECT_TRUE(res.rational);
  EXPECT_EQ(res.q, 5);
}

TEST(OrbitClassify, EscapingOrbit) {
  const AnnulusMap drift(AnnulusMap::Kind::model,
                         [](const AnnulusPoint& x) { return AnnulusPoint{x.theta + 1.0, x.rho + 0.01}; }, 0.0, 1.0);
  EXPECT_EQ(classify_orbit(drift, {0.0, 0.5}, 1000).verdict, OrbitVerdict::escaped);
}

TEST(OrbitClassify, IslandAroundPerturbedResonance) {
  const CurlProfileS3 c = example_curl();
  const double center = 1.0 / 3.0;
  const AnnulusMap m = perturb(analytic_return_map(c, 0.05, 0.95),
                               GeneratingPerturbation::standard(1e-3, 5, center), action_coordinate(c));
  const PeriodicSearch s = find_periodic(m, -2, 5, center);
  ASSERT_TRUE(s.found);
  OrbitClassifyOptions opt;
  for (const auto& o : s.orbits) {
    ClassifyOptions co;
    co.fit_twist = false;
    const FixedPointClass k = classify(m, o, co);
    if (k.elliptic()) opt.centers.push_back({o, k.frame});
  }
  ASSERT_EQ(opt.centers.size(), 1u);
  const AnnulusPoint e = opt.centers[0].orbit.points[0];
  const OrbitClass isl = classify_orbit(m, {e.theta, e.rho + 2e-3}, 10000, opt);
  EXPECT_EQ(isl.verdict, OrbitVerdict::island_chain);
  EXPECT_EQ(isl.p, -2);
  EXPECT_EQ(isl.q, 5);
}

TEST(Kappa, IntegrableFlowIsAllUnknots) {
  const CurlProfileS3 c = example_curl();
  const auto patches = s3_map_patches(analytic_return_map(c, 0.0, 1.0), curl_field(c), 0.0, 1.0);
  const KappaEstimate est = kappa_estimate(patches, Space::s3, small_grid());
  EXPECT_NEAR(est.total_volume, 2 * kPi * kPi, 1e-12);
  EXPECT_NEAR(est.sampled_volume, 2 * kPi * kPi, 2e-2 * 2 * kPi * kPi);
  const KappaClass* un = est.find({IsotopyClass::Kind::unknot, 0, 0});
  ASSERT_NE(un, nullptr);
  EXPECT_NEAR(un->fraction, 1.0, 1e-12);
  EXPECT_EQ(est.lambda(), 0.0);
  EXPECT_EQ(est.verdict_counts[static_cast<int>(OrbitVerdict::invariant_curve)], 144u);
}

TEST(Kappa, DeterministicAcrossThreads) {
  const CurlProfileS3 c = example_curl();
  const auto patches = s3_map_patches(analytic_return_map(c, 0.0, 1.0), curl_field(c), 0.0, 1.0);
  const KappaEstimate a = kappa_estimate(patches, Space::s3, small_grid(1));
  const KappaEstimate b = kappa_estimate(patches, Space::s3, small_grid(3));
  ASSERT_EQ(a.classes.size(), b.classes.size());
  for (std::size_t i = 0; i < a.classes.size(); ++i) {
    EXPECT_EQ(a.classes[i].absolute, b.classes[i].absolute);
    EXPECT_EQ(a.classes[i].count, b.classes[i].count);
  }
  EXPECT_EQ(a.sampled_volume, b.sampled_volume);
  // The seed moves the jittered sample points.
  KappaOptions keep = small_grid(1);
  keep.keep_samples = true;
  KappaOptions other = keep;
  other.seed = 43;
  const KappaEstimate k1 = kappa_estimate(patches, Space::s3, keep);
  const KappaEstimate k2 = kappa_estimate(patches, Space::s3, other);
  const KappaEstimate k3 = kappa_estimate(patches, Space::s3, keep);
  ASSERT_FALSE(k1.samples.empty());
  ASSERT_EQ(k1.samples.size(), k2.samples.size());
  EXPECT_NE(k1.samples[0].seed.theta, k2.samples[0].seed.theta);
  EXPECT_EQ(k1.samples[0].seed.theta, k3.samples[0].seed.theta);
  EXPECT_EQ(k1.samples.back().seed.rho, k3.samples.back().seed.rho);
}

TEST(Kappa, CompareEstimates) {
  const CurlProfileS3 c = example_curl();
  const auto patches = s3_map_patches(analytic_return_map(c, 0.0, 1.0), curl_field(c), 0.0, 1.0);
  const KappaEstimate a = kappa_estimate(patches, Space::s3, small_grid());
  EXPECT_TRUE(compare_estimates(a, a).agree);
  KappaEstimate b = a;
  b.classes[0].absolute *= 0.5;
  EXPECT_FALSE(compare_estimates(a, b).agree);
}

TEST(StabilityProbe, EllipticPointOfHenonMap) {
  const AnnulusMap h = quadratic_henon(1.3);
  PeriodicOrbit o;
  o.points = {{0.0, 0.0}};
  const FixedPointClass k = classify(h, o);
  ProbeOptions opt;
  opt.eps0 = 0.04;
  const StabilityReport rep = stability_probe(h, k, opt);
  EXPECT_TRUE(rep.evidence) << rep.diagnosis;
  ASSERT_EQ(rep.fractions.size(), 4u);
  for (double f : rep.fractions) EXPECT_GE(f, 0.5);
}
