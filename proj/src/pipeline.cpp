#include "eulab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <boost/version.hpp>

#include "eulab/parallel.hpp"

namespace eulab::pipeline {

namespace {

using io::Json;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

const ShearProfileS3& s3_profile(const ExperimentConfig& cfg, const char* what) {
  const auto* p = std::get_if<ShearProfileS3>(&cfg.profile);
  if (!p) throw Error(ErrorCode::validation, std::string(what) + " needs space s3");
  return *p;
}

/// Deterministic uniform samples in [0, 1) for diagnostics.
std::vector<double> uniform_samples(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 eng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = std::generate_canonical<double, 53>(eng);
  return out;
}

GeneratingPerturbation make_perturbation(const ExperimentConfig& cfg, int q, double center) {
  GeneratingPerturbation g = GeneratingPerturbation::standard(cfg.eps, q, center, cfg.bump_radius);
  if (!cfg.harmonics.empty()) g.harmonics = cfg.harmonics;
  return g;
}

KappaOptions kappa_options(const ExperimentConfig& cfg, const Context& ctx) {
  KappaOptions o;
  o.grid = cfg.grid;
  o.iterations = cfg.iterations;
  o.seed = ctx.seed;
  o.threads = ctx.threads;
  o.classify.tol_rot = cfg.tol.rotation;
  o.classify.tol_fit = cfg.tol.fit;
  o.target_stderr = 0.01;
  return o;
}

double map_distance(const AnnulusMap& a, const AnnulusMap& b, double lo, double hi) {
  double worst = 0.0;
  constexpr int n = 128;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const AnnulusPoint x{kTwoPi * (i + 0.5) / n, lo + (hi - lo) * (j + 0.5) / n};
      const AnnulusPoint ya = a(x), yb = b(x);
      worst = std::max(worst, std::hypot(ya.theta - yb.theta, ya.rho - yb.rho));
    }
  return worst;
}

Json setup_json(const ResonantSetup& s) {
  return {{"p", s.p},
          {"q", s.q},
          {"c", s.center},
          {"circles", s.resonance.circles},
          {"winding_range", Json::array({s.resonance.range_lo, s.resonance.range_hi})},
          {"perturbation", io::perturbation_json(s.perturbation, s.p, s.q)}};
}

double divergence_sup(const SuspendedField& sf, double a, double b) {
  double worst = 0.0;
  constexpr int m = 16;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const Vec3 p{kTwoPi * (i + 0.5) / m, kTwoPi * (j + 0.5) / m, a + (b - a) * (k + 0.5) / m};
        worst = std::max(worst, std::abs(sf.divergence(p)));
      }
  return worst;
}

}  // namespace

ResonantSetup resonant_setup(const ExperimentConfig& cfg) {
  const ShearProfileS3& prof = s3_profile(cfg, "the resonant experiment");
  CurlProfileS3 cu = curl(prof);
  ResonanceResult res;
  int p = cfg.p.value_or(0), q = cfg.q.value_or(1);
  double center;
  if (cfg.center) {
    center = *cfg.center;
    if (cfg.has_resonance()) res = find_resonance(cu, cfg.a, cfg.b, p, q);
  } else {
    if (!cfg.has_resonance()) throw Error(ErrorCode::validation, "config: resonance (p, q) required");
    res = find_resonance(cu, cfg.a, cfg.b, p, q);
    if (!res.found) {
      std::ostringstream os;
      os << "no resonant circle with W = 2pi*" << p << "/" << q << " in (" << cfg.a << ", " << cfg.b
         << "); W/2pi ranges over [" << res.range_lo << ", " << res.range_hi << "]";
      throw Error(ErrorCode::numeric, os.str());
    }
    center = res.circles.front();
  }
  GeneratingPerturbation pert = make_perturbation(cfg, q, center);
  AnnulusMap base = analytic_return_map(cu, cfg.a, cfg.b);
  AnnulusMap target = perturb(base, pert, action_coordinate(cu));
  return ResonantSetup{std::move(cu), std::move(res), p, q, center, std::move(pert), std::move(base),
                       std::move(target)};
}

PeriodicAnalysis analyze_periodic(const ResonantSetup& s, const ExperimentConfig& cfg) {
  PeriodicAnalysis out;
  PeriodicSearchOptions po;
  po.seeds = std::max<std::size_t>(cfg.seeds, static_cast<std::size_t>(4 * s.q));
  po.tol = cfg.tol.newton;
  out.search = find_periodic(s.target, s.p, s.q, s.center, po);
  for (const auto& o : out.search.orbits) {
    out.classes.push_back(classify(s.target, o));
    const FixedPointClass& fc = out.classes.back();
    if (fc.elliptic()) out.centers.push_back({o, fc.frame});
    if (!out.elliptic && fc.verdict == FixedPointVerdict::elliptic_nondegenerate) out.elliptic = out.classes.size() - 1;
  }
  return out;
}

KappaEstimate s3_kappa(const ExperimentConfig& cfg, const Context& ctx, bool perturbed,
                       const std::vector<IslandCenter>& centers) {
  const ShearProfileS3& prof = s3_profile(cfg, "s3 kappa");
  const CurlProfileS3 cu = curl(prof);
  KappaOptions opt = kappa_options(cfg, ctx);
  opt.classify.centers = centers;
  const AnnulusMap base = analytic_return_map(cu, 0.0, 1.0);
  if (!perturbed || cfg.eps == 0.0)
    return kappa_estimate(s3_map_patches(base, curl_field(cu), 0.0, 1.0, cfg.return_options()), Space::s3, opt);
  const ResonantSetup setup = resonant_setup(cfg);
  const SuspendedField sf = eulab::suspend(cu, setup.perturbation, cfg.a, cfg.b);
  const AnnulusMap target = perturb(base, setup.perturbation, action_coordinate(cu));
  return kappa_estimate(s3_map_patches(target, sf.field(), 0.0, 1.0, cfg.return_options()), Space::s3, opt);
}

Json provenance(const ExperimentConfig& cfg, const Context& ctx) {
  return {{"config_hash", cfg.hash},
          {"schema_version", kConfigSchemaVersion},
          {"version", kVersion},
          {"seed", ctx.seed},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION}};
}

Json flow(const ExperimentConfig& cfg) {
  Json j;
  j["profile"] = io::profile_json(cfg.profile);
  const auto u = uniform_samples(cfg.seed, 3 * 1000);
  if (const auto* prof = std::get_if<ShearProfileS3>(&cfg.profile)) {
    const CurlProfileS3 cu = curl(*prof);
    const BernoulliProfile b = bernoulli(*prof);
    j["nondegeneracy"] = io::to_json(check_nondegenerate_s3(*prof, cfg.tol.twist));
    j["bernoulli_at_1"] = b.value(1.0);
    std::vector<ChartPointS3> pts(1000);
    for (std::size_t i = 0; i < pts.size(); ++i)
      pts[i] = {kTwoPi * u[3 * i], kTwoPi * u[3 * i + 1], 0.01 + 0.98 * u[3 * i + 2]};
    j["bernoulli_identity_residual"] = bernoulli_identity_residual(*prof, pts);
    const double lo = cfg.a, hi = cfg.b;
    Json samples = Json::array();
    for (int i = 0; i <= 8; ++i) {
      const double r = lo + (hi - lo) * i / 8.0;
      samples.push_back({{"rho", r}, {"f", cu.f(r)}, {"g", cu.g(r)}, {"winding", cu.winding(r)}});
    }
    j["curl_samples"] = samples;
  } else {
    const auto& tprof = std::get<ShearProfileT3>(cfg.profile);
    const CurlProfileT3 cu = curl_t3(tprof);
    j["nondegeneracy"] = io::to_json(check_nondegenerate_t3(tprof, cfg.tol.twist));
    std::vector<Vec3> pts(1000);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {kTwoPi * u[3 * i], kTwoPi * u[3 * i + 1], kTwoPi * u[3 * i + 2]};
    j["bernoulli_identity_residual"] = bernoulli_identity_residual_t3(tprof, pts);
    Json samples = Json::array();
    for (int i = 0; i < 8; ++i) {
      const double z = kTwoPi * i / 8.0;
      samples.push_back({{"z", z}, {"curl_x", cu.F(z)}, {"curl_y", cu.G(z)}});
    }
    j["curl_samples"] = samples;
  }
  return j;
}

void poincare(const ExperimentConfig& cfg, const Context& ctx, std::ostream& csv) {
  struct Row {
    double angle, radial, transit;
  };
  VectorField field;
  std::vector<SectionPatch> patches;
  if (const auto* prof = std::get_if<ShearProfileS3>(&cfg.profile)) {
    const CurlProfileS3 cu = curl(*prof);
    field = cfg.eps > 0.0 ? eulab::suspend(cu, resonant_setup(cfg).perturbation, cfg.a, cfg.b).field()
                          : curl_field(cu);
  } else {
    field = curl_field_t3(curl_t3(std::get<ShearProfileT3>(cfg.profile)));
    patches = t3_field_patches(field, cfg.return_options());
  }
  const std::size_t n = cfg.seeds;
  std::vector<std::vector<Row>> rows(n);
  const ReturnOptions ret = cfg.return_options();
  parallel_for(n, ctx.threads, [&](std::size_t i) {
    SectionSpec sec = s3_section();
    double radial = cfg.a + (cfg.b - cfg.a) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    if (!patches.empty()) {
      const double z = kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      for (const auto& p : patches)
        for (double zz : {z, z + kTwoPi})
          if (zz >= p.radial_lo && zz < p.radial_hi) {
            sec = p.section;
            radial = zz;
          }
    }
    double angle = 0.0;
    rows[i].push_back({angle, radial, 0.0});
    for (std::size_t k = 0; k < cfg.iterations; ++k) {
      const ReturnResult r = return_map(field, sec, angle, radial, ret);
      if (!r.ok()) break;
      angle += r.delta[sec.angle_axis];
      radial = r.point[sec.radial_axis];
      rows[i].push_back({angle, radial, r.transit});
    }
  });
  io::CsvWriter w(csv, {"seed_id", "iter", "theta1_unreduced", "rho", "transit_time"});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) {
      w << i << k << rows[i][k].angle << rows[i][k].radial << rows[i][k].transit;
      w.end_row();
    }
}

void rotnum(const ExperimentConfig& cfg, const Context& ctx, std::ostream& csv) {
  const ShearProfileS3& prof = s3_profile(cfg, "rotnum");
  const CurlProfileS3 cu = curl(prof);
  const AnnulusMap map = cfg.eps > 0.0 ? resonant_setup(cfg).target : analytic_return_map(cu, cfg.a, cfg.b);
  const std::size_t n = cfg.grid.n_radial;
  std::vector<RotationNumber> rn(n);
  std::vector<double> rho(n);
  parallel_for(n, ctx.threads, [&](std::size_t i) {
    rho[i] = cfg.a + (cfg.b - cfg.a) * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    rn[i] = rotation_number(map, {0.0, rho[i]}, cfg.iterations);
  });
  io::CsvWriter w(csv, {"rho", "rotation_number", "confidence"});
  for (std::size_t i = 0; i < n; ++i) {
    w << rho[i] << rn[i].value << rn[i].confidence;
    w.end_row();
  }
}

Json resonance(const ExperimentConfig& cfg) {
  const ShearProfileS3& prof = s3_profile(cfg, "resonance");
  if (!cfg.has_resonance()) throw Error(ErrorCode::validation, "config: resonance (p, q) required");
  const ResonanceResult r = find_resonance(curl(prof), cfg.a, cfg.b, *cfg.p, *cfg.q);
  Json j{{"p", r.p},
         {"q", r.q},
         {"found", r.found},
         {"circles", r.circles},
         {"winding_range", Json::array({r.range_lo, r.range_hi})}};
  if (!r.found) j["diagnosis"] = "no-resonance: p/q outside the range of W/2pi on the annulus";
  return j;
}

Json perturb(const ExperimentConfig& cfg, const Context& ctx) {
  const ResonantSetup s = resonant_setup(cfg);
  const PeriodicAnalysis pa = analyze_periodic(s, cfg);
  Json j;
  j["setup"] = setup_json(s);
  j["map_distance"] = map_distance(s.target, s.base, cfg.a, cfg.b);
  Json orbits = Json::array();
  for (std::size_t i = 0; i < pa.search.orbits.size(); ++i)
    orbits.push_back({{"orbit", io::to_json(pa.search.orbits[i])}, {"class", io::to_json(pa.classes[i])}});
  j["periodic"] = {{"found", pa.search.found},
                   {"degenerate", pa.search.degenerate},
                   {"converged_seeds", pa.search.converged_seeds},
                   {"fixed_points", pa.search.fixed_point_count()},
                   {"diagnosis", pa.search.diagnosis},
                   {"orbits", orbits}};
  if (pa.elliptic) {
    j["stability"] = io::to_json(stability_probe(s.target, pa.classes[*pa.elliptic]));
  } else {
    j["stability"] = nullptr;
  }
  std::vector<double> area;
  const auto u = uniform_samples(ctx.seed, 64);
  double worst = 0.0;
  for (std::size_t i = 0; i < 32; ++i) {
    const AnnulusPoint x{kTwoPi * u[2 * i], s.center + s.perturbation.radius * (2.0 * u[2 * i + 1] - 1.0)};
    worst = std::max(worst, area_residual(s.target, x, 1e-6 * (cfg.b - cfg.a)));
  }
  j["area_residual"] = worst;
  const IntersectionCheck ic = intersection_check(s.target, s.center);
  j["intersection"] = {{"intersects", ic.intersects},
                       {"min_displacement", ic.min_displacement},
                       {"max_displacement", ic.max_displacement}};
  return j;
}

Json suspend(const ExperimentConfig& cfg, const Context& ctx) {
  const ResonantSetup s = resonant_setup(cfg);
  SuspensionCheckOptions opt;
  opt.n_theta = opt.n_rho = cfg.suspension_grid;
  opt.rho_lo = cfg.a;
  opt.rho_hi = cfg.b;
  opt.ret = cfg.return_options();
  opt.threads = ctx.threads;
  const SuspendedField sf = eulab::suspend(s.curl, s.perturbation, cfg.a, cfg.b);
  Json j;
  j["setup"] = setup_json(s);
  j["integrator_tol"] = cfg.tol.integrator;
  j["transversality_floor"] = sf.transversality_floor(cfg.a, cfg.b);
  j["divergence_sup"] = divergence_sup(sf, cfg.a, cfg.b);
  j["report"] = io::to_json(verify_suspension(sf, s.target, opt));
  Json sweep = Json::array();
  for (double e : cfg.eps_sweep) {
    GeneratingPerturbation pe = s.perturbation;
    pe.eps = e;
    try {
      const SuspendedField se = eulab::suspend(s.curl, pe, cfg.a, cfg.b);
      const SuspensionReport r = verify_suspension(se, se.target_map(cfg.a, cfg.b), opt);
      sweep.push_back({{"eps", e}, {"sup", r.sup}, {"rms", r.rms}, {"ratio", r.ratio}});
    } catch (const Error& err) {
      sweep.push_back({{"eps", e}, {"error", {{"code", to_string(err.code())}, {"message", err.what()}}}});
    }
  }
  j["sweep"] = sweep;
  return j;
}

Json kappa(const ExperimentConfig& cfg, const Context& ctx) {
  Json j;
  if (cfg.space == Space::s3) {
    std::vector<IslandCenter> centers;
    if (cfg.eps > 0.0) centers = analyze_periodic(resonant_setup(cfg), cfg).centers;
    j["estimate"] = io::to_json(s3_kappa(cfg, ctx, cfg.eps > 0.0, centers));
  } else {
    const VectorField field = curl_field_t3(curl_t3(std::get<ShearProfileT3>(cfg.profile)));
    j["estimate"] =
        io::to_json(kappa_estimate(t3_field_patches(field, cfg.return_options()), Space::t3, kappa_options(cfg, ctx)));
  }
  if (cfg.transport.kind != DiffeoSpec::Kind::identity) {
    const VectorField field = cfg.space == Space::s3
                                  ? curl_field(curl(std::get<ShearProfileS3>(cfg.profile)))
                                  : curl_field_t3(curl_t3(std::get<ShearProfileT3>(cfg.profile)));
    j["transport"] = io::to_json(transport_invariance_check(field, cfg.transport.build(cfg.space),
                                                            kappa_options(cfg, ctx), 0.0, 1.0, cfg.return_options()));
  }
  return j;
}

Json nonmixing(const ExperimentConfig& cfg, const Context& ctx) {
  const ResonantSetup s = resonant_setup(cfg);
  Json j;
  j["profile"] = io::profile_json(cfg.profile);
  j["nondegeneracy"] = io::to_json(check_nondegenerate_s3(std::get<ShearProfileS3>(cfg.profile), cfg.tol.twist));
  j["setup"] = setup_json(s);

  const PeriodicAnalysis pa = analyze_periodic(s, cfg);
  Json cert = nullptr;
  if (pa.elliptic) {
    const FixedPointClass& fc = pa.classes[*pa.elliptic];
    cert = io::to_json(fc);
    cert["orbit"] = io::to_json(pa.search.orbits[*pa.elliptic]);
    cert["stability"] = io::to_json(stability_probe(s.target, fc));
  }
  j["elliptic_certificate"] = cert;
  j["periodic_diagnosis"] = pa.search.diagnosis;

  SuspensionCheckOptions so;
  so.n_theta = so.n_rho = cfg.suspension_grid;
  so.rho_lo = cfg.a;
  so.rho_hi = cfg.b;
  so.ret = cfg.return_options();
  so.threads = ctx.threads;
  const SuspendedField sf = eulab::suspend(s.curl, s.perturbation, cfg.a, cfg.b);
  j["suspension"] = io::to_json(verify_suspension(sf, s.target, so));

  const KappaEstimate before = s3_kappa(cfg, ctx, false);
  const KappaEstimate after = s3_kappa(cfg, ctx, true, pa.centers);
  j["kappa_before"] = io::to_json(before);
  j["kappa_after"] = io::to_json(after);
  const double lambda = after.lambda();
  const KappaClass* k0 = after.find(IsotopyClass{});
  const double kappa0 = k0 ? k0->absolute : 0.0;
  const double limit = total_volume(Space::s3) - lambda;
  j["lambda"] = lambda;
  j["lambda_stderr"] = after.lambda_stderr();
  j["bound"] = {{"kappa0", kappa0}, {"limit", limit}, {"holds", kappa0 <= limit}};
  return j;
}

}  // namespace eulab::pipeline
