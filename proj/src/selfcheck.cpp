#include "eulab/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "eulab/config.hpp"
#include "eulab/pipeline.hpp"

namespace eulab::selfcheck {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

/// Accumulates named numeric checks; the first few failures go into the
/// detail line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ < 4) fail_ << (failures_ > 1 ? "; " : "") << what;
  }
  template <class T>
  void note(const std::string& key, const T& v) {
    notes_ << (notes_.tellp() > 0 ? ", " : "") << key << "=" << v;
  }
  bool ok() const { return failures_ == 0; }
  std::string detail() const {
    std::string d = notes_.str();
    if (failures_) d += (d.empty() ? "" : " | ") + std::string("FAILED: ") + fail_.str();
    return d;
  }

 private:
  int failures_ = 0;
  std::ostringstream fail_;
  std::ostringstream notes_;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ShearProfileS3 example_profile() {
  return {ScalarFunction::expression("1 + rho", "rho"), ScalarFunction::constant(0.0)};
}

ShearProfileT3 t3_example_profile() {
  return {ScalarFunction::expression("2*cos(z)", "z"), ScalarFunction::expression("sin(z)", "z")};
}

// Closed forms for the example flow, written out independently of the curl code.
double example_f(double r) { return -4.0 * r; }
double example_g(double r) { return 2.0 + 4.0 * r; }
double example_bernoulli(double r) { return r + 0.5 * r * r; }

ExperimentConfig example_config() { return parse_config(io::Json::parse(example_config_json())); }

void example_flow(Checks& c) {
  const ShearProfileS3 prof = example_profile();
  const CurlProfileS3 cu = curl(prof);
  const BernoulliProfile b = bernoulli(prof);
  double df = 0.0, db = 0.0, dt = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double r = i / 100.0;
    df = std::max({df, std::abs(cu.f(r) - example_f(r)), std::abs(cu.g(r) - example_g(r))});
    db = std::max(db, std::abs(b.value(r) - example_bernoulli(r)));
    dt = std::max(dt, std::abs(std::abs(cu.f(r, 1) * cu.g(r) - cu.f(r) * cu.g(r, 1)) - 8.0));
  }
  c.note("curl_err", sci(df));
  c.note("bernoulli_err", sci(db));
  c.note("B(1)", b.value(1.0));
  c.note("twist_err", sci(dt));
  c.expect(df < 1e-9, "curl deviates from (-4rho, 2+4rho)");
  c.expect(db < 1e-9 && std::abs(b.value(1.0) - 1.5) < 1e-9, "Bernoulli deviates from rho + rho^2/2");
  c.expect(dt < 1e-9, "twist |f'g - fg'| deviates from 8");
  const NondegeneracyReport rep = check_nondegenerate_s3(prof, 7.9);
  c.note("tau", rep.tau);
  c.expect(rep.nondegenerate && rep.tau >= 7.9, "twist certificate below 7.9: " + rep.diagnosis);

  // Same flow from spline data.
  std::vector<double> nodes, v1, v2;
  for (int i = 0; i <= 50; ++i) {
    nodes.push_back(i / 50.0);
    v1.push_back(1.0 + i / 50.0);
    v2.push_back(0.0);
  }
  const ShearProfileS3 sp{ScalarFunction::spline(CubicSpline(nodes, v1)), ScalarFunction::spline(CubicSpline(nodes, v2))};
  const CurlProfileS3 scu = curl(sp);
  const BernoulliProfile sb = bernoulli(sp);
  double ds = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double r = i / 200.0;
    ds = std::max({ds, std::abs(scu.f(r) - example_f(r)), std::abs(scu.g(r) - example_g(r)),
                   std::abs(sb.value(r) - example_bernoulli(r))});
  }
  c.note("spline_err", sci(ds));
  c.expect(ds < 1e-6, "spline profile deviates beyond 1e-6");
}

void hopf_identities(Checks& c) {
  const CurlProfileS3 c1 = curl({ScalarFunction::constant(1.0), ScalarFunction::constant(0.0)});
  const CurlProfileS3 c2 = curl({ScalarFunction::constant(0.0), ScalarFunction::constant(1.0)});
  double e1 = 0.0, e2 = 0.0, ed = 0.0;
  const ShearProfileS3 prof = example_profile();
  const CurlProfileS3 cu = curl(prof);
  for (int i = 1; i < 100; ++i) {
    const double r = i / 100.0;
    // rot u1 = -2 u1 with u1 = (1, -1, 0); rot u2 = 2 u2 with u2 = (1, 1, 0).
    e1 = std::max({e1, std::abs(c1.f(r) + 2.0), std::abs(c1.g(r) - 2.0)});
    e2 = std::max({e2, std::abs(c2.f(r) - 2.0), std::abs(c2.g(r) - 2.0)});
    const Vec3 d = curl_via_dual_form(prof, r);
    ed = std::max({ed, std::abs(d[0] - cu.f(r)), std::abs(d[1] - cu.g(r)), std::abs(d[2]),
                   std::abs(d[0] - example_f(r)), std::abs(d[1] - example_g(r))});
  }
  c.note("rot_u1_err", sci(e1));
  c.note("rot_u2_err", sci(e2));
  c.note("dual_form_err", sci(ed));
  c.expect(e1 < 1e-12, "rot u1 != -2 u1");
  c.expect(e2 < 1e-12, "rot u2 != 2 u2");
  c.expect(ed < 1e-10, "dual-form curl disagrees");
}

void bernoulli_identity(Checks& c) {
  std::mt19937_64 eng(20240531);
  auto u = [&] { return std::generate_canonical<double, 53>(eng); };
  std::vector<ChartPointS3> s3(1000);
  for (auto& p : s3) p = {kTwoPi * u(), kTwoPi * u(), 0.001 + 0.998 * u()};
  std::vector<Vec3> t3(1000);
  for (auto& p : t3) p = {kTwoPi * u(), kTwoPi * u(), kTwoPi * u()};
  const double r1 = bernoulli_identity_residual(example_profile(), s3);
  const double r2 = bernoulli_identity_residual_t3(t3_example_profile(), t3);
  c.note("s3_residual", sci(r1));
  c.note("t3_residual", sci(r2));
  c.expect(r1 < 1e-8, "S3 Bernoulli identity residual too large");
  c.expect(r2 < 1e-8, "T3 Bernoulli identity residual too large");
}

void return_equivalence(Checks& c) {
  const VectorField field = curl_field(curl(example_profile()));
  ReturnOptions opt;
  opt.integrator.tol = 1e-10;
  double worst = 0.0;
  int failed = 0;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 25; ++j) {
      const double rho = 0.01 + 0.98 * (i + 0.5) / 40.0, theta = kTwoPi * (j + 0.25) / 25.0;
      const ReturnResult r = return_map(field, s3_section(), theta, rho, opt);
      if (!r.ok()) {
        ++failed;
        continue;
      }
      const double want = theta + kTwoPi * example_f(rho) / example_g(rho);
      worst = std::max({worst, std::abs(theta + r.delta[0] - want), std::abs(r.point[2] - rho)});
    }
  c.note("seeds", 1000);
  c.note("sup_err", sci(worst));
  c.expect(failed == 0, std::to_string(failed) + " seeds did not return");
  c.expect(worst < 1e-7, "return map deviates from (rho, theta + 2 pi f/g)");
}

void resonance_location(Checks& c) {
  const CurlProfileS3 cu = curl(example_profile());
  // W/2π = f/g = -4c/(2 + 4c) = p/q  ⇔  c = -p / (2(p + q)).
  auto oracle = [](int p, int q) { return -static_cast<double>(p) / (2.0 * (p + q)); };
  for (auto [p, q] : {std::pair{-1, 2}, std::pair{-2, 5}}) {
    const ResonanceResult r = find_resonance(cu, 0.001, 0.999, p, q);
    const double want = oracle(p, q);
    const bool hit = r.found && r.circles.size() == 1 && std::abs(r.circles[0] - want) < 1e-10;
    c.note("c(" + std::to_string(p) + "/" + std::to_string(q) + ")", r.found ? r.circles[0] : -1.0);
    c.expect(hit, "resonance " + std::to_string(p) + "/" + std::to_string(q) + " not at " + std::to_string(want));
  }
  const ResonanceResult none = find_resonance_unsigned(cu, 0.001, 0.999, 3, 4);
  c.expect(!none.found, "|p|/q = 3/4 should have no resonance");
}

void elliptic_pipeline(Checks& c) {
  const ExperimentConfig cfg = example_config();
  const pipeline::ResonantSetup s = pipeline::resonant_setup(cfg);
  const pipeline::PeriodicAnalysis pa = pipeline::analyze_periodic(s, cfg);
  c.note("orbits", pa.search.orbits.size());
  c.expect(pa.search.found, "no period-5 orbit: " + pa.search.diagnosis);
  if (!pa.elliptic) {
    c.expect(false, "no elliptic-nondegenerate orbit");
    return;
  }
  const PeriodicOrbit& o = pa.search.orbits[*pa.elliptic];
  const FixedPointClass& fc = pa.classes[*pa.elliptic];
  c.note("q", o.q);
  c.note("residual", sci(o.residual));
  c.note("verdict", to_string(fc.verdict));
  c.note("alpha", sci(fc.alpha) + "+-" + sci(fc.alpha_sigma));
  c.expect(o.q == 5 && o.residual < 1e-9, "orbit residual not below 1e-9");
  c.expect(std::none_of(fc.resonance.begin(), fc.resonance.end(), [](bool b) { return b; }),
           "eigenvalue resonance for k <= 4");
  c.expect(std::abs(fc.alpha) > 3.0 * fc.alpha_sigma && fc.alpha_sigma > 0.0, "alpha not nonzero at 3 sigma");
  const StabilityReport rep = stability_probe(s.target, fc);
  std::ostringstream fr;
  for (std::size_t i = 0; i < rep.fractions.size(); ++i) fr << (i ? "/" : "") << rep.fractions[i];
  c.note("probe", fr.str());
  c.expect(rep.evidence, "stability probe inconclusive");
}

void knotted_kappa(Checks& c, std::size_t threads) {
  const ExperimentConfig cfg = example_config();
  const pipeline::Context ctx{cfg.seed, threads};
  const ExperimentConfig integrable = parse_config(io::Json::parse(integrable_config_json()));
  const KappaEstimate k0 = pipeline::s3_kappa(integrable, ctx, false);
  const KappaClass* base = k0.find(IsotopyClass{});
  const double frac0 = base ? base->fraction : 0.0;
  c.note("integrable_kappa0_fraction", frac0);
  c.expect(std::abs(frac0 - 1.0) <= 0.02, "integrable kappa0 fraction not 1 +- 0.02");

  const pipeline::ResonantSetup s = pipeline::resonant_setup(cfg);
  const pipeline::PeriodicAnalysis pa = pipeline::analyze_periodic(s, cfg);
  const KappaEstimate k = pipeline::s3_kappa(cfg, ctx, true, pa.centers);
  const KappaClass* knot = k.find(knot_class_pq(2, 5));
  const KappaClass* un = k.find(IsotopyClass{});
  const double lambda = k.lambda(), se = k.lambda_stderr();
  const double kappa0 = un ? un->absolute : 0.0;
  c.note("island_orbits", knot ? knot->count : 0);
  c.note("lambda", sci(lambda) + "+-" + sci(se));
  c.note("kappa0", kappa0);
  c.note("limit", total_volume(Space::s3) - lambda);
  c.expect(knot && knot->count >= 10, "fewer than 10 island-chain orbits of class torus-knot(2,5)");
  c.expect(lambda > 0.0 && knot && std::abs(knot->absolute - lambda) < 1e-12 * total_volume(Space::s3),
           "lambda is not the (2,5) class measure");
  c.expect(se < lambda / 3.0, "standard error not below lambda/3");
  c.expect(kappa0 <= total_volume(Space::s3) - lambda, "kappa0 exceeds 2 pi^2 - lambda");
}

void suspension_recovery(Checks& c, std::size_t threads) {
  const ExperimentConfig cfg = example_config();
  const pipeline::ResonantSetup s = pipeline::resonant_setup(cfg);
  SuspensionCheckOptions opt;
  opt.n_theta = opt.n_rho = 64;
  opt.rho_lo = cfg.a;
  opt.rho_hi = cfg.b;
  opt.ret.integrator.tol = 1e-10;
  opt.threads = threads;
  const SuspendedField sf = eulab::suspend(s.curl, s.perturbation, cfg.a, cfg.b);
  const SuspensionReport rep = verify_suspension(sf, s.target, opt);
  c.note("sup", sci(rep.sup));
  c.note("flagged", rep.flagged.size());
  c.expect(rep.sup < 5e-6 && rep.flagged.empty(), "recovery residual not below 5e-6");

  const std::vector<double> sweep{1e-4, 1e-3, 1e-2};
  std::vector<double> res;
  for (double e : sweep) {
    GeneratingPerturbation pe = s.perturbation;
    pe.eps = e;
    const SuspendedField se = eulab::suspend(s.curl, pe, cfg.a, cfg.b);
    res.push_back(verify_suspension(se, se.target_map(cfg.a, cfg.b), opt).sup);
  }
  c.note("sweep", sci(res[0]) + "/" + sci(res[1]) + "/" + sci(res[2]));
  // At most linear growth, allowing the integrator's own error floor.
  for (std::size_t i = 1; i < sweep.size(); ++i)
    c.expect(res[i] <= 2.0 * (sweep[i] / sweep[0]) * res[0] + 10.0 * opt.ret.integrator.tol,
             "residual grows faster than linearly in eps");

  double div = 0.0;
  bool equal_outside = true;
  std::size_t outside = 0;
  std::mt19937_64 eng(7);
  auto u = [&] { return std::generate_canonical<double, 53>(eng); };
  for (int i = 0; i < 20000; ++i) {
    const Vec3 p{kTwoPi * u(), kTwoPi * u(), cfg.a + (cfg.b - cfg.a) * u()};
    div = std::max(div, std::abs(sf.divergence(p)));
    if (!sf.perturbed_at(p)) {
      ++outside;
      const Vec3 w = sf(p), w0 = sf.base(p);
      equal_outside = equal_outside && w == w0;
    }
  }
  const Vec3 probe{1.0, 2.0, 0.5};
  c.note("divergence", sci(div));
  c.note("outside_points", outside);
  c.expect(div <= 1e-12, "divergence exceeds 1e-12");
  c.expect(equal_outside && outside > 1000, "field differs from the base outside the support");
  c.expect(sf.base(probe) == curl_field(s.curl)(probe), "base field is not the curl field");
}

void transport_invariance(Checks& c, std::size_t threads) {
  KappaOptions opt;
  opt.grid.n_angle = opt.grid.n_radial = 24;
  opt.iterations = 1000;
  opt.threads = threads;
  ReturnOptions ret;

  const CurlProfileS3 cu = curl(example_profile());
  const auto rot = VolumePreservingDiffeo::s3_rotation(VolumePreservingDiffeo::HopfGenerator::u1, 0.7);
  const TransportReport a = transport_invariance_check(curl_field(cu), rot, opt, 0.0, 1.0, ret);
  double max_diff = 0.0;
  for (const auto& row : a.rows) max_diff = std::max(max_diff, std::abs(row.before - row.after));
  c.note("s3_rotation_diff", sci(max_diff));
  c.expect(a.agree && max_diff <= 1e-12 * total_volume(Space::s3), "s3-rotation changed kappa: " + a.diagnosis);

  const VectorField t3 = curl_field_t3(curl_t3(t3_example_profile()));
  const auto shear = VolumePreservingDiffeo::t3_shear(ScalarFunction::expression("sin(z)", "z"),
                                                      ScalarFunction::expression("cos(z)", "z"));
  const TransportReport b = transport_invariance_check(t3, shear, opt, 0.0, 1.0, ret);
  double t3_diff = 0.0;
  for (const auto& row : b.rows) t3_diff = std::max(t3_diff, std::abs(row.before - row.after));
  c.note("t3_shear_diff", sci(t3_diff));
  c.expect(b.agree, "t3-shear estimates disagree beyond 2 standard errors: " + b.diagnosis);

  // A field that is not invariant under the rotation: the suspended
  // perturbation depends on both angles.
  const ExperimentConfig cfg = example_config();
  const pipeline::ResonantSetup s = pipeline::resonant_setup(cfg);
  const SuspendedField sf = eulab::suspend(s.curl, s.perturbation, cfg.a, cfg.b);
  const TransportReport d = transport_invariance_check(sf.field(), rot, opt, 0.0, 1.0, ret);
  std::ostringstream rows;
  for (const auto& row : d.rows)
    rows << (rows.tellp() > 0 ? " " : "") << row.cls.tag() << ":" << sci(row.before) << "->" << sci(row.after) << "("
         << sci(row.combined_stderr) << ")";
  c.note("suspended_rotation", rows.str());
  c.expect(d.agree, "rotated suspended field disagrees beyond 2 standard errors: " + d.diagnosis);
}

void property_suites(Checks& c, std::size_t threads) {
  const ExperimentConfig cfg = example_config();
  const pipeline::ResonantSetup s = pipeline::resonant_setup(cfg);
  std::mt19937_64 eng(11);
  auto u = [&] { return std::generate_canonical<double, 53>(eng); };

  // Area preservation.
  double area = 0.0;
  for (int i = 0; i < 200; ++i) {
    const AnnulusPoint x{kTwoPi * u(), s.center + s.perturbation.radius * (2.0 * u() - 1.0)};
    area = std::max(area, area_residual(s.target, x, 1e-6 * (cfg.b - cfg.a)));
  }
  const AnnulusMap numeric = numeric_return_map(curl_field(s.curl), s3_section(), cfg.a, cfg.b);
  double area_num = 0.0;
  for (int i = 0; i < 16; ++i)
    area_num = std::max(area_num, area_residual(numeric, {kTwoPi * u(), 0.1 + 0.8 * u()}, 1e-5));
  c.note("area_residual", sci(area));
  c.note("numeric_area_residual", sci(area_num));
  c.expect(area < 1e-8, "perturbed map not area preserving to 1e-8");
  c.expect(area_num < 1e-6, "numeric return map not area preserving to 1e-6");

  // Intersection property on circles through the perturbation.
  bool intersects = true;
  for (int i = 0; i < 11; ++i) {
    const double r = s.center + s.perturbation.radius * (i - 5) / 5.5;
    intersects = intersects && intersection_check(s.target, r).intersects;
  }
  c.expect(intersects, "a circle misses its image");

  // Rotation number of Π0^q is q times that of Π0, mod 1.
  double qerr = 0.0;
  for (int q : {2, 3, 5}) {
    const AnnulusMap pq(AnnulusMap::Kind::analytic, [&, q](const AnnulusPoint& x) { return s.base.power(x, q); },
                        cfg.a, cfg.b);
    for (int i = 0; i < 10; ++i) {
      const double r = 0.1 + 0.08 * i;
      const double r1 = rotation_number(s.base, {0.0, r}, 2000).value;
      const double rq = rotation_number(pq, {0.0, r}, 2000).value;
      const double d = std::remainder(q * r1 - rq, 1.0);
      qerr = std::max(qerr, std::abs(d));
    }
  }
  c.note("q_scaling_err", sci(qerr));
  c.expect(qerr < 1e-8, "rotation number does not scale with q");

  // First integrals along field lines: ρ and the Bernoulli function for the
  // S³ flow, z for the T³ flow.
  const ShearProfileS3 prof = example_profile();
  const BernoulliProfile b = bernoulli(prof);
  double drift = 0.0;
  for (int i = 0; i < 8; ++i) {
    const Vec3 p0{kTwoPi * u(), kTwoPi * u(), 0.1 + 0.8 * u()};
    for (const VectorField& f : {shear_field(prof), curl_field(s.curl)}) {
      const Trajectory tr = trace(f, p0, 20.0);
      for (const auto& p : tr.points) drift = std::max(drift, std::abs(b.value(p[2]) - b.value(p0[2])));
    }
    const Trajectory t3 = trace(shear_field_t3(t3_example_profile()), {u(), u(), kTwoPi * u()}, 20.0);
    for (const auto& p : t3.points) drift = std::max(drift, std::abs(p[2] - t3.points.front()[2]));
  }
  c.note("first_integral_drift", sci(drift));
  c.expect(drift < 1e-10, "first integral drifts along field lines");

  // Determinism under thread-count variation.
  KappaOptions ko;
  ko.grid.n_angle = ko.grid.n_radial = 16;
  ko.iterations = 1000;
  ko.seed = 42;
  const SuspendedField sf = eulab::suspend(s.curl, s.perturbation, cfg.a, cfg.b);
  const AnnulusMap full = perturb(analytic_return_map(s.curl, 0.0, 1.0), s.perturbation, action_coordinate(s.curl));
  const auto patches = s3_map_patches(full, sf.field(), 0.0, 1.0);
  ko.threads = 1;
  const std::string one = io::dump(io::to_json(kappa_estimate(patches, Space::s3, ko)));
  ko.threads = std::max<std::size_t>(4, threads);
  const std::string many = io::dump(io::to_json(kappa_estimate(patches, Space::s3, ko)));
  c.expect(one == many, "kappa estimate depends on the thread count");
  c.note("deterministic", one == many ? "yes" : "no");
}

struct Entry {
  const char* title;
  double budget;
};

constexpr Entry kEntries[kCriteria] = {
    {"example-flow regression", 1.0},        {"Hopf eigenfield identities", 1.0},
    {"Bernoulli identity", 5.0},             {"return-map equivalence", 60.0},
    {"resonance location", 1.0},             {"elliptic periodic orbit pipeline", 600.0},
    {"knotted kappa", 1800.0},               {"suspension recovery", 600.0},
    {"transport invariance", 1800.0},        {"property suites", 600.0},
};

}  // namespace

std::string example_config_json() {
  return R"({
  "schema_version": 1,
  "space": "s3",
  "profile": {"domain": "s3", "kind": "closed-form", "f1": "1 + rho", "f2": "0"},
  "annulus": [0.05, 0.95],
  "resonance": {"p": -2, "q": 5},
  "perturbation": {"eps": 0.001, "bump_radius": 0.1},
  "seeds": 32,
  "iterations": 10000,
  "grid": {"n_angle": 200, "n_radial": 200, "jitter": true},
  "tolerances": {"integrator": 1e-10, "rotation": 1e-7, "fit": 1e-5, "newton": 1e-11, "twist": 7.9},
  "suspension": {"grid": 64},
  "seed": 0
})";
}

std::string integrable_config_json() {
  return R"({
  "schema_version": 1,
  "space": "s3",
  "profile": {"domain": "s3", "kind": "closed-form", "f1": "1 + rho", "f2": "0"},
  "annulus": [0.05, 0.95],
  "iterations": 10000,
  "grid": {"n_angle": 200, "n_radial": 200, "jitter": true},
  "tolerances": {"integrator": 1e-10, "rotation": 1e-7, "fit": 1e-5, "twist": 7.9},
  "seed": 0
})";
}

CriterionResult run_criterion(int id, const Options& opt) {
  if (id < 1 || id > kCriteria) throw Error(ErrorCode::validation, "no criterion " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.title = kEntries[id - 1].title;
  r.budget = kEntries[id - 1].budget;
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (id) {
      case 1: example_flow(c); break;
      case 2: hopf_identities(c); break;
      case 3: bernoulli_identity(c); break;
      case 4: return_equivalence(c); break;
      case 5: resonance_location(c); break;
      case 6: elliptic_pipeline(c); break;
      case 7: knotted_kappa(c, opt.threads); break;
      case 8: suspension_recovery(c, opt.threads); break;
      case 9: transport_invariance(c, opt.threads); break;
      case 10: property_suites(c, opt.threads); break;
    }
  } catch (const std::exception& e) {
    c.expect(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.expect(r.seconds < r.budget, "runtime " + sci(r.seconds) + " s over budget");
  r.passed = c.ok();
  r.detail = c.detail();
  return r;
}

std::vector<CriterionResult> run(const Options& opt, const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<int> ids = opt.only;
  if (ids.empty())
    for (int i = 1; i <= kCriteria; ++i) ids.push_back(i);
  std::vector<CriterionResult> out;
  for (int id : ids) {
    out.push_back(run_criterion(id, opt));
    if (on_result) on_result(out.back());
  }
  return out;
}

std::string format(const CriterionResult& r) {
  char head[160];
  std::snprintf(head, sizeof head, "criterion %2d [%s] %s (%.2f s / %.0f s): ", r.id, r.passed ? "PASS" : "FAIL",
                r.title.c_str(), r.seconds, r.budget);
  return head + r.detail;
}

}  // namespace eulab::selfcheck
