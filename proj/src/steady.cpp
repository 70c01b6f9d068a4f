#include "eulab/steady.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "eulab/errors.hpp"
#include "eulab/numerics.hpp"

namespace eulab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Lipschitz-certified lower bound of a sampled nonnegative quantity: every
// cell contributes min(endpoint values) − spacing × L. Cells whose bound
// falls below the coarse sample minimum are subdivided once.
struct CertifiedMin {
  double sampled_min;
  double certified;
};

CertifiedMin certify_minimum(const std::function<double(double)>& q, double lo, double hi, std::size_t n,
                             double lipschitz) {
  const double h = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = q(i + 1 == n ? hi : lo + h * static_cast<double>(i));
  const double coarse_min = *std::min_element(v.begin(), v.end());
  double sampled_min = coarse_min;
  double certified = std::numeric_limits<double>::infinity();
  constexpr int kSub = 16;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double bound = std::min(v[i], v[i + 1]) - h * lipschitz;
    if (bound >= coarse_min || lipschitz == 0.0) {
      certified = std::min(certified, bound);
      continue;
    }
    const double a = lo + h * static_cast<double>(i);
    const double hs = h / kSub;
    double prev = v[i];
    for (int k = 1; k <= kSub; ++k) {
      const double cur = k == kSub ? v[i + 1] : q(a + hs * k);
      sampled_min = std::min(sampled_min, cur);
      certified = std::min(certified, std::min(prev, cur) - hs * lipschitz);
      prev = cur;
    }
  }
  return {sampled_min, certified};
}

double estimate_lipschitz(const std::function<double(double)>& dq, double lo, double hi, std::size_t n) {
  double m = 0.0;
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(dq(lo + h * static_cast<double>(i))));
  return 1.25 * m;
}

}  // namespace

void validate_periodic(const ShearProfileT3& prof) {
  for (const auto* fn : {&prof.f, &prof.g}) {
    const double a = (*fn)(0.0), b = (*fn)(kTwoPi);
    if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
      throw Error(ErrorCode::validation, "T3 profile is not 2π-periodic");
  }
}

std::string_view to_string(MorseBottVerdict v) {
  switch (v) {
    case MorseBottVerdict::ok: return "ok";
    case MorseBottVerdict::failed: return "failed";
    case MorseBottVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

double CurlProfileS3::A1(double rho, int order) const {
  const auto& f1 = prof_.f1;
  const auto& f2 = prof_.f2;
  const double s = 2.0 * rho - 1.0;
  switch (order) {
    case 0: return -(f1.eval(rho, 1) * s + 2.0 * f1(rho) + f2.eval(rho, 1));
    case 1: return -(f1.eval(rho, 2) * s + 4.0 * f1.eval(rho, 1) + f2.eval(rho, 2));
    case 2: return -(f1.eval(rho, 3) * s + 6.0 * f1.eval(rho, 2) + f2.eval(rho, 3));
    default: throw Error(ErrorCode::evaluation, "curl coefficient derivative order must be 0..2");
  }
}

double CurlProfileS3::A2(double rho, int order) const {
  const auto& f1 = prof_.f1;
  const auto& f2 = prof_.f2;
  const double s = 2.0 * rho - 1.0;
  switch (order) {
    case 0: return f2.eval(rho, 1) * s + 2.0 * f2(rho) + f1.eval(rho, 1);
    case 1: return f2.eval(rho, 2) * s + 4.0 * f2.eval(rho, 1) + f1.eval(rho, 2);
    case 2: return f2.eval(rho, 3) * s + 6.0 * f2.eval(rho, 2) + f1.eval(rho, 3);
    default: throw Error(ErrorCode::evaluation, "curl coefficient derivative order must be 0..2");
  }
}

double CurlProfileS3::action(double rho) const { return 2.0 * rho * (prof_.f1(rho) + prof_.f2(rho)); }

double CurlProfileS3::winding(double rho) const { return kTwoPi * f(rho) / g(rho); }

double CurlProfileS3::winding_derivative(double rho) const {
  const double gv = g(rho);
  return kTwoPi * (f(rho, 1) * gv - f(rho) * g(rho, 1)) / (gv * gv);
}

double BernoulliProfile::value(double x) const {
  if (space_ == Space::t3) {
    const double f = t3_->f(x), g = t3_->g(x);
    return 0.5 * (f * f + g * g) - offset_;
  }
  if (x == 0.0) return 0.0;
  const auto& prof = *s3_;
  double error = 0.0;
  const double result = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&prof](double s) { return bernoulli_integrand(prof, s); }, 0.0, x, 20, 1e-12, &error);
  if (!(error <= 1e-10 * std::max(1.0, std::abs(result)))) {
    std::ostringstream os;
    os << "Bernoulli quadrature did not converge on [0, " << x << "]: estimate " << result
       << ", error " << error;
    throw Error(ErrorCode::numeric, os.str());
  }
  return result;
}

double BernoulliProfile::derivative(double x) const {
  if (space_ == Space::t3) return t3_->f(x) * t3_->f.eval(x, 1) + t3_->g(x) * t3_->g.eval(x, 1);
  return bernoulli_integrand(*s3_, x);
}

double BernoulliProfile::second_derivative(double x) const {
  if (space_ == Space::t3) {
    const auto& p = *t3_;
    const double f1 = p.f.eval(x, 1), g1 = p.g.eval(x, 1);
    return f1 * f1 + p.f(x) * p.f.eval(x, 2) + g1 * g1 + p.g(x) * p.g.eval(x, 2);
  }
  const auto& p = *s3_;
  const double a = p.f1(x), a1 = p.f1.eval(x, 1), a2 = p.f1.eval(x, 2);
  const double b = p.f2(x), b1 = p.f2.eval(x, 1), b2 = p.f2.eval(x, 2);
  const double s = 2.0 * x - 1.0;
  return a1 * a1 + a * a2 + b1 * b1 + b * b2 + 4.0 * (a1 * b + a * b1) + 2.0 * (a * b1 + b * a1) +
         s * (2.0 * a1 * b1 + a * b2 + b * a2);
}

Vec3 eval_field(const ShearProfileS3& prof, const ChartPointS3& p) {
  if (!(p.rho > 0.0 && p.rho < 1.0)) throw Error(ErrorCode::chart_domain, "rho outside (0, 1)");
  const double a = prof.f1(p.rho), b = prof.f2(p.rho);
  return {a + b, -a + b, 0.0};
}

Vec3 eval_field_t3(const ShearProfileT3& prof, const Vec3& p) { return {prof.f(p[2]), prof.g(p[2]), 0.0}; }

CurlProfileS3 curl(const ShearProfileS3& prof) { return CurlProfileS3(prof); }
CurlProfileT3 curl_t3(const ShearProfileT3& prof) { return CurlProfileT3(prof); }

Vec3 curl_via_dual_form(const ShearProfileS3& prof, double rho) {
  // Chart components of u and the metric give α = a dθ1 + b dθ2 with
  // a = ρ(f1+f2), b = (1−ρ)(f2−f1). Then dα = a′ dρ∧dθ1 + b′ dρ∧dθ2.
  const Vec3 gdiag = metric_diagonal(Space::s3, {0.0, 0.0, rho});
  const double u1 = prof.f1(rho) + prof.f2(rho);
  const double u2 = prof.f2(rho) - prof.f1(rho);
  const double du1 = prof.f1.eval(rho, 1) + prof.f2.eval(rho, 1);
  const double du2 = prof.f2.eval(rho, 1) - prof.f1.eval(rho, 1);
  // d/dρ of the metric coefficients g11 = ρ, g22 = 1 − ρ.
  const double da = 1.0 * u1 + gdiag[0] * du1;
  const double db = -1.0 * u2 + gdiag[1] * du2;
  // (dα)_{ij} = ∂_i α_j − ∂_j α_i with coordinates (θ1, θ2, ρ).
  const double d23 = -db;  // ∂θ2 αρ − ∂ρ αθ2
  const double d31 = da;   // ∂ρ αθ1 − ∂θ1 αρ
  const double d12 = 0.0;
  const double j = volume_density(Space::s3);
  return {d23 / j, d31 / j, d12 / j};
}

double bernoulli_integrand(const ShearProfileS3& prof, double s) {
  const double a = prof.f1(s), a1 = prof.f1.eval(s, 1);
  const double b = prof.f2(s), b1 = prof.f2.eval(s, 1);
  return a * a1 + b * b1 + 4.0 * a * b + (2.0 * s - 1.0) * (a * b1 + b * a1);
}

BernoulliProfile bernoulli(const ShearProfileS3& prof) {
  BernoulliProfile b;
  b.space_ = Space::s3;
  b.s3_ = prof;
  b.offset_ = 0.0;
  return b;
}

BernoulliProfile bernoulli_t3(const ShearProfileT3& prof) {
  BernoulliProfile b;
  b.space_ = Space::t3;
  b.t3_ = prof;
  const double f = prof.f(0.0), g = prof.g(0.0);
  b.offset_ = 0.5 * (f * f + g * g);
  return b;
}

NondegeneracyReport check_nondegenerate_s3(const ShearProfileS3& prof, double tau_request,
                                           const NondegeneracyOptions& opt) {
  NondegeneracyReport rep;
  rep.tau_request = tau_request;
  const std::size_t n = std::max<std::size_t>(opt.grid, 16);
  const CurlProfileS3 c(prof);
  const BernoulliProfile bern = bernoulli(prof);

  // Morse-Bott: 𝓑′ must not vanish on [0, 1], so the critical set is the link.
  std::vector<double> d(n);
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = static_cast<double>(i) / static_cast<double>(n - 1);
    d[i] = bern.derivative(rho);
    dmax = std::max(dmax, std::abs(d[i]));
    dmin = std::min(dmin, std::abs(d[i]));
  }
  std::ostringstream diag;
  if (dmax == 0.0) {
    rep.morse_bott = MorseBottVerdict::failed;
    diag << "Bernoulli function is constant; ";
  } else {
    auto roots = numerics::sign_change_roots([&](double r) { return bern.derivative(r); }, 0.0, 1.0, n);
    std::vector<double> interior;
    for (double r : roots)
      if (r > 0.0 && r < 1.0) interior.push_back(r);
    if (!interior.empty()) {
      rep.morse_bott = MorseBottVerdict::failed;
      for (double r : interior) rep.critical.push_back({r, bern.value(r), bern.second_derivative(r)});
      diag << interior.size() << " interior critical torus/tori of the Bernoulli function; ";
    } else if (dmin < opt.resolution * dmax) {
      rep.morse_bott = MorseBottVerdict::inconclusive;
      diag << "Bernoulli derivative nearly vanishes (min " << dmin << "); ";
    } else {
      rep.morse_bott = MorseBottVerdict::ok;
    }
    // Near L0, ρ = r²; near L1, 1 − ρ = r².
    rep.critical.insert(rep.critical.begin(), {0.0, 0.0, 2.0 * d.front()});
    rep.critical.push_back({1.0, bern.value(1.0), -2.0 * d.back()});
  }

  auto twist = [&](double r) { return std::abs(c.f(r, 1) * c.g(r) - c.f(r) * c.g(r, 1)); };
  auto twist_slope = [&](double r) { return c.f(r, 2) * c.g(r) - c.f(r) * c.g(r, 2); };
  rep.lipschitz = opt.lipschitz ? *opt.lipschitz : estimate_lipschitz(twist_slope, 0.0, 1.0, n);
  const auto cm = certify_minimum(twist, 0.0, 1.0, n, rep.lipschitz);
  rep.twist_min = cm.sampled_min;
  rep.tau = cm.certified;

  const bool twist_ok = rep.tau > 0.0 && rep.tau >= tau_request;
  if (!twist_ok) diag << "twist condition not certified (tau = " << rep.tau << "); ";
  rep.nondegenerate = twist_ok && rep.morse_bott == MorseBottVerdict::ok;
  rep.diagnosis = diag.str();
  return rep;
}

NondegeneracyReport check_nondegenerate_t3(const ShearProfileT3& prof, double tau_request,
                                           const NondegeneracyOptions& opt) {
  validate_periodic(prof);
  NondegeneracyReport rep;
  rep.tau_request = tau_request;
  const std::size_t n = std::max<std::size_t>(opt.grid, 16);
  const BernoulliProfile bern = bernoulli_t3(prof);
  std::ostringstream diag;

  // Morse-Bott: critical tori z_k of 𝓑(z) need 𝓑″(z_k) ≠ 0.
  double dmax = 0.0, hmax = 0.0;
  std::vector<double> d(n);
  const double h = kTwoPi / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = h * static_cast<double>(i);
    d[i] = bern.derivative(z);
    dmax = std::max(dmax, std::abs(d[i]));
    hmax = std::max(hmax, std::abs(bern.second_derivative(z)));
  }
  if (dmax <= 1e-14 * std::max(1.0, std::abs(bern.offset()))) {
    rep.morse_bott = MorseBottVerdict::failed;
    diag << "Bernoulli function is constant; ";
  } else {
    rep.morse_bott = MorseBottVerdict::ok;
    auto roots = numerics::sign_change_roots([&](double z) { return bern.derivative(z); }, 0.0, kTwoPi, n,
                                             1e-13, true);
    for (double z : roots) {
      const double hz = bern.second_derivative(z);
      rep.critical.push_back({z, bern.value(z), hz});
      if (std::abs(hz) < opt.resolution * hmax) {
        rep.morse_bott = MorseBottVerdict::failed;
        diag << "degenerate critical torus at z = " << z << "; ";
      }
    }
    // Tangential zeros of 𝓑′ are invisible to sign changes.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double a = std::abs(d[i]);
      if (a < std::abs(d[i - 1]) && a < std::abs(d[i + 1]) && a < opt.resolution * dmax &&
          (d[i - 1] < 0) == (d[i + 1] < 0) && rep.morse_bott == MorseBottVerdict::ok) {
        rep.morse_bott = MorseBottVerdict::inconclusive;
        diag << "unresolved near-critical point at z = " << h * static_cast<double>(i) << "; ";
      }
    }
  }

  auto tw = [&](double z) {
    return prof.f.eval(z, 2) * prof.g.eval(z, 1) - prof.f.eval(z, 1) * prof.g.eval(z, 2);
  };
  auto tw_slope = [&](double z) {
    return prof.f.eval(z, 3) * prof.g.eval(z, 1) - prof.f.eval(z, 1) * prof.g.eval(z, 3);
  };
  rep.lipschitz = opt.lipschitz ? *opt.lipschitz : estimate_lipschitz(tw_slope, 0.0, kTwoPi, n);

  std::vector<double> tv(n);
  std::size_t zero_count = 0;
  double tmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    tv[i] = tw(h * static_cast<double>(i));
    tmax = std::max(tmax, std::abs(tv[i]));
  }
  for (double v : tv)
    if (std::abs(v) <= 1e-14 * std::max(1.0, tmax)) ++zero_count;
  if (zero_count > n / 4) {
    diag << "twist quantity vanishes on a set of positive measure; ";
    rep.nondegenerate = false;
    rep.diagnosis = diag.str();
    return rep;
  }
  rep.twist_zeros = numerics::sign_change_roots(tw, 0.0, kTwoPi, n, 1e-13, true);

  // Ω_τ: maximal grid runs with |tw| ≥ τ, endpoints refined by bisection.
  if (tau_request > 0.0) {
    auto excess = [&](double z) { return std::abs(tw(z)) - tau_request; };
    std::size_t i = 0;
    while (i < n) {
      if (std::abs(tv[i]) < tau_request) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 < n && std::abs(tv[j + 1]) >= tau_request) ++j;
      const double zi = h * static_cast<double>(i), zj = h * static_cast<double>(j);
      const double lo = i == 0 ? 0.0 : numerics::bisect(excess, zi - h, zi);
      const double hi = j + 1 == n ? kTwoPi : numerics::bisect(excess, zj, zj + h);
      rep.omega_tau.push_back({lo, hi});
      i = j + 1;
    }
  }

  double smin = std::numeric_limits<double>::infinity(), cert = smin;
  for (const auto& iv : rep.omega_tau) {
    const std::size_t m = std::max<std::size_t>(
        16, static_cast<std::size_t>(static_cast<double>(n) * (iv.hi - iv.lo) / kTwoPi));
    const auto cm = certify_minimum([&](double z) { return std::abs(tw(z)); }, iv.lo, iv.hi, m, rep.lipschitz);
    smin = std::min(smin, cm.sampled_min);
    cert = std::min(cert, cm.certified);
  }
  rep.twist_min = rep.omega_tau.empty() ? 0.0 : smin;
  rep.tau = rep.omega_tau.empty() ? 0.0 : cert;

  const bool twist_ok = !rep.omega_tau.empty() && tau_request > 0.0;
  if (!twist_ok) diag << "twist condition holds nowhere at the requested tau; ";
  rep.nondegenerate = twist_ok && rep.morse_bott == MorseBottVerdict::ok;
  rep.diagnosis = diag.str();
  return rep;
}

double bernoulli_identity_residual(const ShearProfileS3& prof, std::span<const ChartPointS3> points) {
  const CurlProfileS3 c(prof);
  const BernoulliProfile bern = bernoulli(prof);
  const double j = volume_density(Space::s3);
  double worst = 0.0;
  for (const auto& p : points) {
    const Vec3 u = eval_field(prof, p);
    const Vec3 w{c.f(p.rho), c.g(p.rho), 0.0};
    // (u × ω)♭ = i_ω i_u μ has components J ε_ijk u^i ω^j.
    const Vec3 uw = cross(u, w);
    const Vec3 r{j * uw[0], j * uw[1], j * uw[2] - bern.derivative(p.rho)};
    const Vec3 g = metric_diagonal(Space::s3, p.coords());
    const double norm = std::sqrt(r[0] * r[0] / g[0] + r[1] * r[1] / g[1] + r[2] * r[2] / g[2]);
    worst = std::max(worst, norm);
  }
  return worst;
}

double bernoulli_identity_residual_t3(const ShearProfileT3& prof, std::span<const Vec3> points) {
  const CurlProfileT3 c(prof);
  const BernoulliProfile bern = bernoulli_t3(prof);
  double worst = 0.0;
  for (const auto& p : points) {
    const Vec3 u = eval_field_t3(prof, p);
    const Vec3 w{c.F(p[2]), c.G(p[2]), 0.0};
    const Vec3 uw = cross(u, w);
    const Vec3 r{uw[0], uw[1], uw[2] - bern.derivative(p[2])};
    worst = std::max(worst, std::sqrt(dot(r, r)));
  }
  return worst;
}

VectorField shear_field(const ShearProfileS3& prof) {
  return {Space::s3, [prof](const Vec3& p) { return eval_field(prof, ChartPointS3::from(p)); }};
}

VectorField shear_field_t3(const ShearProfileT3& prof) {
  return {Space::t3, [prof](const Vec3& p) { return eval_field_t3(prof, p); }};
}

VectorField curl_field(const CurlProfileS3& c) {
  return {Space::s3, [c](const Vec3& p) {
            if (!(p[2] > 0.0 && p[2] < 1.0)) throw Error(ErrorCode::chart_domain, "rho outside (0, 1)");
            return Vec3{c.f(p[2]), c.g(p[2]), 0.0};
          }};
}

VectorField curl_field_t3(const CurlProfileT3& c) {
  return {Space::t3, [c](const Vec3& p) { return Vec3{c.F(p[2]), c.G(p[2]), 0.0}; }};
}

}  // namespace eulab
