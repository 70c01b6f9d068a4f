#include "eulab/kam.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "eulab/errors.hpp"
#include "eulab/geometry.hpp"
#include "eulab/parallel.hpp"

namespace eulab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool periodic_angle(const AnnulusMap& m) { return m.kind() != AnnulusMap::Kind::model; }

Eigen::Vector2d displacement(const AnnulusMap& m, const AnnulusPoint& y, const AnnulusPoint& x) {
  double dt = y.theta - x.theta;
  if (periodic_angle(m)) dt = std::remainder(dt, kTwoPi);
  return {dt, y.rho - x.rho};
}

struct Libration {
  bool ok = false;
  double rotation = 0.0;
  double confidence = std::numeric_limits<double>::infinity();
};

/// Rotation of the points ξ_k about the origin of a frame; requires at
/// least one full turn.
Libration libration_of(const std::vector<Eigen::Vector2d>& xi) {
  Libration lib;
  if (xi.size() < 16) return lib;
  std::vector<double> inc(xi.size() - 1);
  double prev = std::atan2(xi[0][1], xi[0][0]);
  for (std::size_t k = 1; k < xi.size(); ++k) {
    const double a = std::atan2(xi[k][1], xi[k][0]);
    inc[k - 1] = std::remainder(a - prev, kTwoPi);
    prev = a;
  }
  const double total = std::accumulate(inc.begin(), inc.end(), 0.0);
  if (std::abs(total) < kTwoPi) return lib;
  const RotationNumber rn = rotation_number_of_increments(inc);
  lib.rotation = rn.signed_value;
  lib.confidence = rn.confidence;
  lib.ok = true;
  return lib;
}

/// Libration of the q-th-iterate subsequence about a matching island centre
/// (or the subsequence centroid when none is known).
Libration island_libration(const AnnulusMap& map, const Orbit& orbit, int p, int q,
                           const OrbitClassifyOptions& opt) {
  std::vector<AnnulusPoint> sub;
  for (std::size_t k = 0; k < orbit.points.size(); k += static_cast<std::size_t>(q)) sub.push_back(orbit.points[k]);
  if (sub.size() < 64) return {};

  const IslandCenter* best = nullptr;
  std::size_t best_point = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& c : opt.centers) {
    if (c.orbit.q != q || c.orbit.p != p) continue;
    for (std::size_t i = 0; i < c.orbit.points.size(); ++i) {
      const double d = displacement(map, sub.front(), c.orbit.points[i]).norm();
      if (d < best_dist) {
        best_dist = d;
        best = &c;
        best_point = i;
      }
    }
  }

  std::vector<Eigen::Vector2d> xi(sub.size());
  if (best) {
    const Eigen::Matrix2d inv = best->frame.inverse();
    const AnnulusPoint z = best->orbit.points[best_point];
    for (std::size_t k = 0; k < sub.size(); ++k) {
      // The subsequence must stay closest to the same centre point.
      const double dz = displacement(map, sub[k], z).norm();
      for (std::size_t i = 0; i < best->orbit.points.size(); ++i)
        if (i != best_point && displacement(map, sub[k], best->orbit.points[i]).norm() < dz) return {};
      xi[k] = inv * displacement(map, sub[k], z);
    }
  } else {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& y : sub) mean += displacement(map, y, sub.front());
    mean /= static_cast<double>(sub.size());
    for (std::size_t k = 0; k < sub.size(); ++k) xi[k] = displacement(map, sub[k], sub.front()) - mean;
  }
  return libration_of(xi);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index, std::mt19937_64& eng) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  eng.seed(seq);
  return index;
}

}  // namespace

std::string_view to_string(OrbitVerdict v) {
  switch (v) {
    case OrbitVerdict::invariant_curve: return "invariant-curve";
    case OrbitVerdict::island_chain: return "island-chain";
    case OrbitVerdict::chaotic: return "chaotic";
    case OrbitVerdict::escaped: return "escaped";
    case OrbitVerdict::undecided: return "undecided";
  }
  return "?";
}

std::optional<std::pair<long, long>> rational_lock(double x, double tol, long max_q) {
  if (!std::isfinite(x)) return std::nullopt;
  long h0 = 1, h1 = 0, k0 = 0, k1 = 1;  // convergents h_{n-1}/k_{n-1}, h_{n-2}/k_{n-2}
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    if (std::abs(a) > 1e15) break;
    const long ai = static_cast<long>(a);
    const long h = ai * h0 + h1, k = ai * k0 + k1;
    if (k > max_q) break;
    if (std::abs(x - static_cast<double>(h) / static_cast<double>(k)) <= tol) return std::make_pair(h, k);
    h1 = h0;
    h0 = h;
    k1 = k0;
    k0 = k;
    const double frac = r - a;
    if (frac <= 0.0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

double trig_fit_residual(const std::vector<double>& angles, const std::vector<double>& values, int degree,
                         std::size_t samples) {
  const std::size_t n = angles.size();
  if (n == 0 || values.size() != n) return std::numeric_limits<double>::infinity();
  std::vector<double> red(n);
  for (std::size_t i = 0; i < n; ++i) red[i] = reduce_angle(angles[i]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return red[a] < red[b]; });

  const std::size_t m = std::min(samples, n);
  int d = degree;
  while (d > 0 && m < static_cast<std::size_t>(2 * (2 * d + 1))) --d;
  const double max_gap = kTwoPi / (2.0 * d + 1.0);
  double gap = kTwoPi - red[order.back()] + red[order.front()];
  for (std::size_t i = 1; i < n; ++i) gap = std::max(gap, red[order[i]] - red[order[i - 1]]);
  if (gap > max_gap) return std::numeric_limits<double>::infinity();

  const int cols = 2 * d + 1;
  auto basis = [d](double t, double* row) {
    row[0] = 1.0;
    const double c1 = std::cos(t), s1 = std::sin(t);
    double c = 1.0, s = 0.0;
    for (int k = 1; k <= d; ++k) {
      const double cn = c * c1 - s * s1;
      s = s * c1 + c * s1;
      c = cn;
      row[2 * k - 1] = c;
      row[2 * k] = s;
    }
  };
  Eigen::MatrixXd a(m, cols);
  Eigen::VectorXd b(m);
  std::vector<double> row(cols);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = order[(k * n) / m];
    basis(red[i], row.data());
    for (int c = 0; c < cols; ++c) a(k, c) = row[c];
    b[k] = values[i];
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    basis(red[i], row.data());
    double v = 0.0;
    for (int c = 0; c < cols; ++c) v += coef[c] * row[c];
    worst = std::max(worst, std::abs(v - values[i]));
  }
  return worst;
}

double arc_fit_residual(const std::vector<double>& angles, const std::vector<double>& values, double split_gap,
                        int max_degree) {
  const std::size_t n = angles.size();
  if (n == 0 || values.size() != n) return std::numeric_limits<double>::infinity();
  std::vector<double> red(n);
  for (std::size_t i = 0; i < n; ++i) red[i] = reduce_angle(angles[i]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return red[a] < red[b]; });

  // Runs of angle-sorted points separated by gaps wider than split_gap; the
  // last run continues into the first across 2π when the wrap gap is small.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t from = 0;
  for (std::size_t k = 1; k <= n; ++k)
    if (k == n || red[order[k]] - red[order[k - 1]] > split_gap) {
      runs.emplace_back(from, k);
      from = k;
    }
  const bool wraps = runs.size() > 1 && kTwoPi - red[order.back()] + red[order.front()] <= split_gap;

  double worst = 0.0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (wraps && r + 1 == runs.size()) break;
    std::vector<double> t, v;
    auto take = [&](std::pair<std::size_t, std::size_t> run, double shift) {
      for (std::size_t k = run.first; k < run.second; ++k) {
        t.push_back(red[order[k]] + shift);
        v.push_back(values[order[k]]);
      }
    };
    if (wraps && r == 0) take(runs.back(), -kTwoPi);
    take(runs[r], 0.0);
    if (t.size() < 12) return std::numeric_limits<double>::infinity();
    const double lo = *std::min_element(t.begin(), t.end()), hi = *std::max_element(t.begin(), t.end());
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    if (half <= 0.0) return std::numeric_limits<double>::infinity();
    const int d = std::min<int>(max_degree, static_cast<int>(t.size() / 4));
    // Chebyshev basis on the run, least squares over all of its points.
    Eigen::MatrixXd a(t.size(), d + 1);
    Eigen::VectorXd b(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double u = (t[i] - mid) / half;
      a(i, 0) = 1.0;
      if (d >= 1) a(i, 1) = u;
      for (int k = 2; k <= d; ++k) a(i, k) = 2.0 * u * a(i, k - 1) - a(i, k - 2);
      b[i] = v[i];
    }
    const Eigen::VectorXd res = a * a.colPivHouseholderQr().solve(b) - b;
    worst = std::max(worst, res.cwiseAbs().maxCoeff());
  }
  return worst;
}

OrbitClass classify_orbit(const AnnulusMap& map, const Orbit& orbit, const OrbitClassifyOptions& opt) {
  OrbitClass oc;
  oc.rotation = rotation_number(orbit);
  if (orbit.escaped) {
    oc.verdict = OrbitVerdict::escaped;
    return oc;
  }
  const double conf = oc.rotation.confidence;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& pt : orbit.points) {
    lo = std::min(lo, pt.rho);
    hi = std::max(hi, pt.rho);
  }
  bool fitted = false;
  auto fit = [&] {
    if (fitted) return oc.fit_residual;
    fitted = true;
    if (hi - lo < 0.1 * opt.tol_fit) {
      oc.fit_residual = 0.5 * (hi - lo);
    } else {
      std::vector<double> th(orbit.points.size()), rh(orbit.points.size());
      for (std::size_t i = 0; i < th.size(); ++i) {
        th[i] = orbit.points[i].theta;
        rh[i] = orbit.points[i].rho;
      }
      oc.fit_residual = trig_fit_residual(th, rh, opt.degree, opt.fit_samples);
    }
    return oc.fit_residual;
  };

  auto invariant_curve = [&] {
    oc.verdict = OrbitVerdict::invariant_curve;
    // Every real number lies within 1/(qQ) of some p/q with q ≤ Q, so a lock
    // at tolerance δ only means something for denominators well below δ^(−1/2).
    const double tol = std::max(10.0 * conf, 1e-12);
    const long max_q = std::min<long>(opt.max_resonant_denominator, static_cast<long>(std::sqrt(0.01 / tol)));
    if (auto r = rational_lock(oc.rotation.signed_value, tol, std::max(1L, max_q))) {
      oc.rational = true;
      oc.p = static_cast<int>(r->first);
      oc.q = static_cast<int>(r->second);
    }
    return oc;
  };

  if (conf < opt.tol_rot && fit() < opt.tol_fit) return invariant_curve();

  const auto island_lock = rational_lock(oc.rotation.signed_value, std::max(10.0 * conf, 1e-9), opt.max_island_period);
  // A converged orbit near (but not at) a low-order resonance fills its curve
  // slowly and leaves angular gaps; test it as a graph arc by arc instead.
  if (!island_lock && conf < opt.tol_rot && std::isinf(fit())) {
    std::vector<double> th(orbit.points.size()), rh(orbit.points.size());
    for (std::size_t i = 0; i < th.size(); ++i) {
      th[i] = orbit.points[i].theta;
      rh[i] = orbit.points[i].rho;
    }
    const double arc = arc_fit_residual(th, rh, kTwoPi / (2.0 * opt.degree + 1.0), 8);
    if (arc < opt.tol_fit) {
      oc.fit_residual = arc;
      return invariant_curve();
    }
  }

  if (const auto& r = island_lock) {
    const int p = static_cast<int>(r->first), q = static_cast<int>(r->second);
    const Libration lib = island_libration(map, orbit, p, q, opt);
    oc.rational = true;
    oc.p = p;
    oc.q = q;
    oc.libration_rotation = lib.rotation;
    oc.libration_confidence = lib.confidence;
    if (lib.ok && lib.confidence < opt.tol_libration) {
      oc.verdict = OrbitVerdict::island_chain;
      return oc;
    }
  }

  if (conf > opt.chaos_confidence && !(fit() < opt.tol_fit)) {
    oc.verdict = OrbitVerdict::chaotic;
    return oc;
  }
  oc.verdict = OrbitVerdict::undecided;
  return oc;
}

OrbitClass classify_orbit(const AnnulusMap& map, const AnnulusPoint& x, std::size_t n,
                          const OrbitClassifyOptions& opt) {
  return classify_orbit(map, iterate(map, x, n), opt);
}

std::string IsotopyClass::tag() const {
  switch (kind) {
    case Kind::unknot: return "unknot";
    case Kind::t3_horizontal: return "t3-horizontal";
    case Kind::other: return "other";
    case Kind::torus_knot: {
      std::ostringstream os;
      os << "torus-knot(" << p << "," << q << ")";
      return os.str();
    }
  }
  return "?";
}

IsotopyClass knot_class_pq(int p, int q) {
  IsotopyClass c;
  const int a = std::min(std::abs(p), std::abs(q)), b = std::max(std::abs(p), std::abs(q));
  if (a <= 1) return c;
  if (std::gcd(a, b) != 1 || b > kMaxTrackedPeriod) {
    c.kind = IsotopyClass::Kind::other;
    c.p = a;
    c.q = b;
    return c;
  }
  c.kind = IsotopyClass::Kind::torus_knot;
  c.p = a;
  c.q = b;
  return c;
}

IsotopyClass knot_class(double delta_theta_total, int q) {
  return knot_class_pq(static_cast<int>(std::lround(delta_theta_total / kTwoPi)), q);
}

const KappaClass* KappaEstimate::find(const IsotopyClass& c) const {
  for (const auto& k : classes)
    if (k.cls == c) return &k;
  return nullptr;
}

double KappaEstimate::lambda() const {
  double s = 0.0;
  for (const auto& k : classes)
    if (k.cls.nontrivial()) s += k.absolute;
  return s;
}

double KappaEstimate::lambda_stderr() const {
  double s = 0.0;
  for (const auto& k : classes)
    if (k.cls.nontrivial()) s += k.stderr_abs * k.stderr_abs;
  return std::sqrt(s);
}

KappaEstimate kappa_estimate(const std::vector<SectionPatch>& patches, Space space, const KappaOptions& opt) {
  KappaEstimate est;
  est.space = space;
  est.total_volume = total_volume(space);
  est.grid = opt.grid;
  est.iterations = opt.iterations;
  est.seed = opt.seed;
  est.patches = patches.size();
  const std::size_t per = opt.grid.n_angle * opt.grid.n_radial;
  const std::size_t n = per * patches.size();
  std::vector<KappaSample> samples(n);

  parallel_for(n, opt.threads, [&](std::size_t g) {
    KappaSample& s = samples[g];
    s.patch = g / per;
    s.cell = g % per;
    const SectionPatch& patch = patches[s.patch];
    const std::size_t i = s.cell % opt.grid.n_angle, j = s.cell / opt.grid.n_angle;
    double u1 = 0.5, u2 = 0.5;
    if (opt.grid.jitter) {
      std::mt19937_64 eng;
      mix_seed(opt.seed, g, eng);
      u1 = std::generate_canonical<double, 53>(eng);
      u2 = std::generate_canonical<double, 53>(eng);
    }
    const double d_angle = kTwoPi / static_cast<double>(opt.grid.n_angle);
    const double d_radial = (patch.radial_hi - patch.radial_lo) / static_cast<double>(opt.grid.n_radial);
    s.seed = {d_angle * (static_cast<double>(i) + u1), patch.radial_lo + d_radial * (static_cast<double>(j) + u2)};
    const double area = d_angle * d_radial;
    if (patch.field) {
      Vec3 p{0.0, 0.0, 0.0};
      p[patch.section.section_axis] = patch.section.target;
      p[patch.section.angle_axis] = s.seed.theta;
      p[patch.section.radial_axis] = s.seed.rho;
      const double speed = std::abs((*patch.field)(p)[patch.section.section_axis]);
      const ReturnResult r = return_map(*patch.field, patch.section, s.seed.theta, s.seed.rho, patch.ret);
      s.transit = r.ok() ? r.transit : kTwoPi / speed;
      s.weight = volume_density(space) * speed * s.transit * area;
    } else {
      s.weight = patch.map.density(s.seed) * area;
    }
    s.orbit = classify_orbit(patch.map, iterate(patch.map, s.seed, opt.iterations), opt.classify);
    if (s.orbit.verdict == OrbitVerdict::invariant_curve && !s.orbit.rational) {
      s.cls = patch.base_class;
    } else if (s.orbit.verdict == OrbitVerdict::island_chain) {
      s.cls = patch.base_class.kind == IsotopyClass::Kind::unknot ? knot_class_pq(s.orbit.p, s.orbit.q)
                                                                   : IsotopyClass{IsotopyClass::Kind::other, 0, 0};
    }
  });

  // Ordered reduction.
  double w_sum = 0.0, w2_sum = 0.0;
  std::vector<IsotopyClass> order;
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& pch : patches)
    if (std::find(order.begin(), order.end(), pch.base_class) == order.end()) order.push_back(pch.base_class);
  for (const auto& s : samples) {
    w_sum += s.weight;
    w2_sum += s.weight * s.weight;
    est.verdict_counts[static_cast<int>(s.orbit.verdict)]++;
    if (!s.cls) continue;
    if (std::find(order.begin(), order.end(), *s.cls) == order.end()) order.push_back(*s.cls);
    auto& a = acc[s.cls->tag()];
    a.first += s.weight;
    a.second += 1;
  }
  std::sort(order.begin() + static_cast<long>(std::min<std::size_t>(1, order.size())), order.end(),
            [](const IsotopyClass& a, const IsotopyClass& b) { return a.tag() < b.tag(); });
  est.sampled_volume = w_sum;
  const double n_eff = w2_sum > 0.0 ? w_sum * w_sum / w2_sum : 0.0;
  double classified = 0.0;
  for (const auto& c : order) {
    KappaClass k;
    k.cls = c;
    const auto it = acc.find(c.tag());
    if (it != acc.end()) {
      k.absolute = it->second.first;
      k.count = it->second.second;
    }
    const double ph = w_sum > 0.0 ? k.absolute / w_sum : 0.0;
    k.stderr_abs = n_eff > 0.0 ? w_sum * std::sqrt(ph * (1.0 - ph) / n_eff) : 0.0;
    k.fraction = k.absolute / est.total_volume;
    classified += k.absolute;
    if (opt.target_stderr > 0.0 && k.stderr_abs > opt.target_stderr * est.total_volume) {
      std::ostringstream os;
      os << "precision: standard error of " << c.tag() << " is " << k.stderr_abs / est.total_volume
         << " of the total volume; refine the grid";
      est.warnings.push_back(os.str());
    }
    est.classes.push_back(k);
  }
  est.unclassified = w_sum > 0.0 ? std::max(0.0, 1.0 - classified / w_sum) : 1.0;
  if (opt.keep_samples) est.samples = std::move(samples);
  return est;
}

std::vector<SectionPatch> s3_field_patches(const VectorField& field, double a, double b, const ReturnOptions& ret) {
  return {SectionPatch{numeric_return_map(field, s3_section(), a, b, ret), a, b, field, s3_section(), ret,
                       IsotopyClass{}}};
}

std::vector<SectionPatch> s3_map_patches(const AnnulusMap& map, const VectorField& field, double a, double b,
                                         const ReturnOptions& ret) {
  return {SectionPatch{map, a, b, field, s3_section(), ret, IsotopyClass{}}};
}

std::vector<SectionPatch> t3_field_patches(const VectorField& field, const ReturnOptions& ret) {
  constexpr int n = 4096;
  const double h = kTwoPi / n;
  auto axis_at = [&](double z) {
    const Vec3 w = field({0.0, 0.0, z});
    if (w[2] != 0.0) throw Error(ErrorCode::section, "T3 section cover needs a field without z-component");
    return std::abs(w[0]) >= std::abs(w[1]) ? 0 : 1;
  };
  struct Run {
    int axis;
    double lo, hi;
  };
  std::vector<Run> runs;
  for (int i = 0; i < n; ++i) {
    const double z = h * i;
    const int ax = axis_at(z + 0.5 * h);
    if (!runs.empty() && runs.back().axis == ax)
      runs.back().hi = z + h;
    else
      runs.push_back({ax, z, z + h});
  }
  if (runs.size() > 1 && runs.front().axis == runs.back().axis) {
    runs.back().hi = runs.front().hi + kTwoPi;
    runs.erase(runs.begin());
  }
  std::vector<SectionPatch> out;
  for (const auto& r : runs) {
    const double mid = 0.5 * (r.lo + r.hi);
    const Vec3 w = field({0.0, 0.0, mid});
    const int dir = w[r.axis] >= 0.0 ? 1 : -1;
    const SectionSpec sec = r.axis == 0 ? t3_x_section(0.0, dir) : t3_y_section(0.0, dir);
    out.push_back(SectionPatch{numeric_return_map(field, sec, r.lo, r.hi, ret), r.lo, r.hi, field, sec, ret,
                               IsotopyClass{IsotopyClass::Kind::t3_horizontal, 0, 0}});
  }
  return out;
}

StabilityReport stability_probe(const AnnulusMap& map, const FixedPointClass& fc, const ProbeOptions& opt) {
  StabilityReport rep;
  rep.point = fc.point;
  std::ostringstream diag;
  if (fc.verdict != FixedPointVerdict::elliptic_nondegenerate)
    diag << "input point is " << to_string(fc.verdict) << ", not elliptic-nondegenerate; ";
  const Eigen::Matrix2d inv = fc.frame.inverse();
  int run = 0, best_run = 0;
  for (int j = 0; j < opt.annuli; ++j) {
    const double outer = opt.eps0 * std::pow(0.5, j), inner = 0.5 * outer;
    int invariant = 0;
    for (int s = 0; s < opt.seeds; ++s) {
      const double r = inner + (outer - inner) * (s + 0.5) / opt.seeds;
      const Eigen::Vector2d d = fc.frame * Eigen::Vector2d(r, 0.0);
      AnnulusPoint y{fc.point.theta + d[0], fc.point.rho + d[1]};
      std::vector<Eigen::Vector2d> xi{Eigen::Vector2d(r, 0.0)};
      bool lost = false;
      for (std::size_t k = 0; k < opt.iterations; ++k) {
        y = map.power(y, fc.q);
        if (!std::isfinite(y.rho)) {
          lost = true;
          break;
        }
        xi.push_back(inv * displacement(map, y, fc.point));
        if (!(xi.back().norm() < 8.0 * opt.eps0)) {
          lost = true;
          break;
        }
      }
      if (lost) continue;
      const Libration lib = libration_of(xi);
      if (!lib.ok || !(lib.confidence < opt.tol_rot)) continue;
      std::vector<double> ang(xi.size()), rad(xi.size());
      for (std::size_t k = 0; k < xi.size(); ++k) {
        ang[k] = std::atan2(xi[k][1], xi[k][0]);
        rad[k] = xi[k].norm();
      }
      const double res = trig_fit_residual(ang, rad, opt.degree, 512);
      if (res < opt.tol_fit * r) ++invariant;
    }
    const double frac = static_cast<double>(invariant) / opt.seeds;
    rep.inner.push_back(inner);
    rep.outer.push_back(outer);
    rep.fractions.push_back(frac);
    run = frac >= opt.threshold ? run + 1 : 0;
    best_run = std::max(best_run, run);
  }
  rep.evidence = best_run >= opt.consecutive;
  rep.verdict = rep.evidence ? "KAM-stable-evidence" : "inconclusive";
  if (!rep.evidence) diag << "invariant-curve fraction below " << opt.threshold << " in too many annuli";
  rep.diagnosis = diag.str();
  return rep;
}

TransportReport compare_estimates(const KappaEstimate& before, const KappaEstimate& after) {
  TransportReport rep;
  std::vector<IsotopyClass> tags;
  for (const auto& k : before.classes) tags.push_back(k.cls);
  for (const auto& k : after.classes)
    if (std::find(tags.begin(), tags.end(), k.cls) == tags.end()) tags.push_back(k.cls);
  const double floor = 1e-12 * before.total_volume;
  for (const auto& t : tags) {
    TransportRow row;
    row.cls = t;
    const KappaClass* a = before.find(t);
    const KappaClass* b = after.find(t);
    const double sa = a ? a->stderr_abs : 0.0, sb = b ? b->stderr_abs : 0.0;
    row.before = a ? a->absolute : 0.0;
    row.after = b ? b->absolute : 0.0;
    row.combined_stderr = std::sqrt(sa * sa + sb * sb);
    row.agree = std::abs(row.before - row.after) <= 2.0 * row.combined_stderr + floor;
    rep.agree = rep.agree && row.agree;
    rep.rows.push_back(row);
  }
  return rep;
}

TransportReport transport_invariance_check(const VectorField& field, const VolumePreservingDiffeo& phi,
                                           const KappaOptions& opt, double a, double b, const ReturnOptions& ret) {
  const VectorField pushed = pushforward_field(field, phi);
  auto patches = [&](const VectorField& w) {
    return w.space == Space::s3 ? s3_field_patches(w, a, b, ret) : t3_field_patches(w, ret);
  };
  const KappaEstimate before = kappa_estimate(patches(field), field.space, opt);
  KappaEstimate after;
  try {
    after = kappa_estimate(patches(pushed), field.space, opt);
  } catch (const Error& e) {
    TransportReport rep;
    rep.agree = false;
    rep.diagnosis = std::string("pushforward analysis failed: ") + e.what();
    return rep;
  }
  TransportReport rep = compare_estimates(before, after);
  for (const KappaEstimate* e : {&before, static_cast<const KappaEstimate*>(&after)})
    if (e->verdict_counts[static_cast<int>(OrbitVerdict::escaped)] > 0)
      rep.diagnosis += "some section orbits failed to return; ";
  return rep;
}

}  // namespace eulab
