#include "eulab/suspension.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <type_traits>

#include "eulab/dual.hpp"
#include "eulab/errors.hpp"
#include "eulab/parallel.hpp"

namespace eulab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
}  // namespace

double temporal_bump(double tau) {
  const double x = (tau - kPi) / (0.5 * kPi);
  if (!(std::abs(x) < 1.0)) return 0.0;
  const double w = 1.0 - x * x;
  const double w2 = w * w;
  return 693.0 / (256.0 * kPi) * w2 * w2 * w;
}

double temporal_bump_integral(double tau) {
  const double x = (tau - kPi) / (0.5 * kPi);
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double x2 = x * x;
  const double poly = 1.0 + x2 * (-5.0 / 3.0 + x2 * (2.0 + x2 * (-10.0 / 7.0 + x2 * (5.0 / 9.0 - x2 / 11.0))));
  return 693.0 / 512.0 * x * poly + 0.5;
}

SuspendedField::SuspendedField(CurlProfileS3 base, GeneratingPerturbation pert)
    : curl_(std::move(base)), pert_(std::move(pert)), action_(action_coordinate(curl_)) {}

template <class T>
std::array<T, 3> SuspendedField::eval(const T& theta1, double theta2, const T& rho) const {
  const double r = value_of(rho);
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::chart_domain, "rho outside (0, 1)");
  const double fv = curl_.f(r), gv = curl_.g(r);
  const double g1 = curl_.g(r, 1);
  const T f = chain(rho, fv, curl_.f(r, 1));
  const T g = chain(rho, gv, g1);

  const double tau = reduce_angle(theta2);
  const double chi = temporal_bump(tau);
  if (chi == 0.0 || pert_.eps == 0.0 || !pert_.in_support(r)) return {f, g, T(0.0)};

  // Winding W = 2πf/g and its derivatives.
  const double f1 = curl_.f(r, 1);
  const double num = f1 * gv - fv * g1;
  const double w1 = kTwoPi * num / (gv * gv);
  T winding_slope = T(w1);
  const T gp = chain(rho, g1, curl_.g(r, 2));
  if constexpr (std::is_same_v<T, Dual>) {
    const double f2 = curl_.f(r, 2), g2 = curl_.g(r, 2);
    const double w2 = kTwoPi * ((f2 * gv - fv * g2) / (gv * gv) - 2.0 * num * g1 / (gv * gv * gv));
    winding_slope = chain(rho, w1, w2);
  }
  const T winding = chain(rho, kTwoPi * fv / gv, w1);

  const double e = pert_.eps * temporal_bump_integral(tau);
  const T big_q = theta1 - (tau / kTwoPi) * winding;

  // Solve Q = q + e σ_ρ(q, P)/g(P) for q, then lift q through one Newton
  // step so that its derivatives follow the implicit function theorem.
  const double qv_target = value_of(big_q);
  double q = qv_target;
  for (int it = 0; it < 60; ++it) {
    const auto j = pert_.jet(q, r);
    const double step = (q + e * j.s_r / gv - qv_target) / (1.0 + e * j.s_tr / gv);
    q -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(q))) break;
  }
  T q_t = T(q);
  if constexpr (std::is_same_v<T, Dual>) {
    const auto jd = pert_.jet(T(q), rho);
    const double denom = 1.0 + e * pert_.jet(q, r).s_tr / gv;
    q_t = T(q) - (T(q) + e * jd.s_r / g - big_q) / denom;
  }

  const auto j = pert_.jet(q_t, rho);
  const T s_p = j.s_r / g;
  const T s_qp = j.s_tr / g;
  const T s_pp = j.s_rr / (g * g) - j.s_r * gp / (g * g * g);
  const T d = 1.0 + e * s_qp;
  const T z_angle = s_p - e * j.s_t * s_pp / d;
  const T z_rho = -j.s_t / d / g;
  const T y_angle = (pert_.eps * chi) * z_angle;
  const T y_rho = (pert_.eps * chi) * z_rho;
  const T v_angle = y_angle + (tau / kTwoPi) * winding_slope * y_rho;
  return {f + g * v_angle, g, g * y_rho};
}

Vec3 SuspendedField::operator()(const Vec3& p) const { return eval<double>(p[0], p[1], p[2]); }

Vec3 SuspendedField::base(const Vec3& p) const {
  if (!(p[2] > 0.0 && p[2] < 1.0)) throw Error(ErrorCode::chart_domain, "rho outside (0, 1)");
  return {curl_.f(p[2]), curl_.g(p[2]), 0.0};
}

double SuspendedField::divergence(const Vec3& p) const {
  const auto w = eval<Dual>(Dual::variable(p[0], 0), p[1], Dual::variable(p[2], 1));
  // The θ2-component depends on ρ only.
  return w[0].d[0] + w[2].d[1];
}

bool SuspendedField::perturbed_at(const Vec3& p) const {
  return pert_.eps != 0.0 && temporal_bump(reduce_angle(p[1])) != 0.0 && pert_.in_support(p[2]);
}

VectorField SuspendedField::field() const {
  return {Space::s3, [self = *this](const Vec3& p) { return self(p); }};
}

VectorField SuspendedField::base_field() const {
  return {Space::s3, [self = *this](const Vec3& p) { return self.base(p); }};
}

AnnulusMap SuspendedField::target_map(double a, double b) const {
  return perturb(analytic_return_map(curl_, a, b), pert_, action_);
}

double SuspendedField::transversality_floor(double a, double b) const {
  double m = std::numeric_limits<double>::infinity();
  constexpr int n = 1024;
  for (int i = 0; i <= n; ++i) m = std::min(m, curl_.g(a + (b - a) * i / n));
  return m;
}

SuspendedField suspend(const CurlProfileS3& base, const GeneratingPerturbation& pert, double a, double b) {
  if (!(a < b)) throw Error(ErrorCode::validation, "annulus bounds must satisfy a < b");
  if (pert.eps != 0.0 && !(pert.center - pert.radius > a && pert.center + pert.radius < b)) {
    std::ostringstream os;
    os << "perturbation support [" << pert.center - pert.radius << ", " << pert.center + pert.radius
       << "] must lie inside the annulus (" << a << ", " << b << ")";
    throw Error(ErrorCode::validation, os.str());
  }
  check_amplitude(pert, action_coordinate(base));
  SuspendedField s(base, pert);
  const double floor = s.transversality_floor(a, b);
  if (!(floor > 0.0)) {
    std::ostringstream os;
    os << "theta2-component of the suspended field is not positive (min " << floor << ")";
    throw Error(ErrorCode::amplitude, os.str());
  }
  return s;
}

SuspensionReport verify_suspension(const SuspendedField& sf, const AnnulusMap& target,
                                   const SuspensionCheckOptions& opt) {
  SuspensionReport rep;
  const std::size_t n = opt.n_theta * opt.n_rho;
  rep.cells = n;
  const VectorField field = sf.field();
  const AnnulusMap base = analytic_return_map(sf.curl(), target.lower(), target.upper());
  std::vector<double> residual(n, 0.0), map_dev(n, 0.0);
  std::vector<char> failed(n, 0);
  parallel_for(n, opt.threads, [&](std::size_t k) {
    const std::size_t i = k % opt.n_theta, jr = k / opt.n_theta;
    const double theta = kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(opt.n_theta);
    const double rho =
        opt.rho_lo + (opt.rho_hi - opt.rho_lo) * (static_cast<double>(jr) + 0.5) / static_cast<double>(opt.n_rho);
    const AnnulusPoint want = target({theta, rho});
    const AnnulusPoint ref = base({theta, rho});
    map_dev[k] = std::hypot(want.theta - ref.theta, want.rho - ref.rho);
    const ReturnResult r = return_map(field, s3_section(), theta, rho, opt.ret);
    if (!r.ok()) {
      failed[k] = 1;
      return;
    }
    residual[k] = std::hypot(theta + r.delta[0] - want.theta, r.point[2] - want.rho);
  });
  double sum2 = 0.0;
  std::size_t good = 0;
  for (std::size_t k = 0; k < n; ++k) {
    rep.map_deviation = std::max(rep.map_deviation, map_dev[k]);
    if (failed[k]) {
      rep.flagged.push_back(k);
      continue;
    }
    rep.sup = std::max(rep.sup, residual[k]);
    sum2 += residual[k] * residual[k];
    ++good;
  }
  rep.rms = good ? std::sqrt(sum2 / static_cast<double>(good)) : 0.0;

  constexpr int m = 16;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        const Vec3 p{kTwoPi * (a + 0.5) / m, kTwoPi * (b + 0.5) / m,
                     target.lower() + (target.upper() - target.lower()) * (c + 0.5) / m};
        const Vec3 w = sf(p), w0 = sf.base(p);
        rep.field_deviation = std::max(
            {rep.field_deviation, std::abs(w[0] - w0[0]), std::abs(w[1] - w0[1]), std::abs(w[2] - w0[2])});
      }
  rep.ratio = rep.map_deviation > 0.0 ? rep.field_deviation / rep.map_deviation : 0.0;
  return rep;
}

}  // namespace eulab
