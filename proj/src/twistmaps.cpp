#include "eulab/twistmaps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "eulab/errors.hpp"
#include "eulab/geometry.hpp"
#include "eulab/numerics.hpp"

namespace eulab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool periodic_angle(const AnnulusMap& m) { return m.kind() != AnnulusMap::Kind::model; }

/// Displacement y − x with the angular part wrapped into (−π, π] on annuli.
Eigen::Vector2d displacement(const AnnulusMap& m, const AnnulusPoint& y, const AnnulusPoint& x) {
  double dt = y.theta - x.theta;
  if (periodic_angle(m)) dt = std::remainder(dt, kTwoPi);
  return {dt, y.rho - x.rho};
}

double fd_step(const AnnulusMap& m, double requested) { return requested > 0.0 ? requested : 1e-6 * m.scale(); }

}  // namespace

ActionCoordinate action_coordinate(const CurlProfileS3& curl) {
  return {[curl](double r) { return curl.action(r); }, [curl](double r) { return curl.g(r); }};
}

ActionCoordinate uniform_action() {
  return {[](double r) { return r; }, [](double) { return 1.0; }};
}

GeneratingPerturbation GeneratingPerturbation::standard(double eps, int q, double center, double radius) {
  GeneratingPerturbation g;
  g.eps = eps;
  g.center = center;
  g.radius = radius;
  g.harmonics = {Harmonic{q, 1.0, 0.0}};
  return g;
}

AnnulusPoint generating_step(const GeneratingPerturbation& pert, const ActionCoordinate& action,
                             const AnnulusPoint& x) {
  if (pert.eps == 0.0 || !pert.in_support(x.rho)) return x;
  const double target = action.action(x.rho);
  double r = x.rho;
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    const auto j = pert.jet(x.theta, r);
    const double g = action.density(r);
    const double contraction = pert.eps * j.s_tr / g;
    if (!(std::abs(contraction) < 0.5)) {
      std::ostringstream os;
      os << "generating-function solve does not contract at (theta, rho) = (" << x.theta << ", " << r
         << "): |eps*sigma_theta_rho/g| = " << std::abs(contraction);
      throw Error(ErrorCode::amplitude, os.str());
    }
    const double step = (action.action(r) + pert.eps * j.s_t - target) / (g + pert.eps * j.s_tr);
    r -= step;
    if (converged) break;  // one polishing step after the tolerance is met
    if (std::abs(step) < pert.tol) converged = true;
  }
  if (!converged) throw Error(ErrorCode::amplitude, "generating-function solve did not converge");
  const auto j = pert.jet(x.theta, r);
  return {x.theta + pert.eps * j.s_r / action.density(r), r};
}

AnnulusMap perturb(const AnnulusMap& base, const GeneratingPerturbation& pert, const ActionCoordinate& action) {
  check_amplitude(pert, action);
  const AnnulusMap::Density density = [base](const AnnulusPoint& x) { return base.density(x); };
  return AnnulusMap(
      AnnulusMap::Kind::generating,
      [base, pert, action](const AnnulusPoint& x) { return base(generating_step(pert, action, x)); },
      base.lower(), base.upper(), density);
}

void check_amplitude(const GeneratingPerturbation& pert, const ActionCoordinate& action) {
  if (!(pert.radius > 0.0)) throw Error(ErrorCode::validation, "bump radius must be positive");
  if (pert.eps == 0.0) return;
  constexpr int n = 64;
  for (int i = 0; i < n; ++i) {
    const double theta = kTwoPi * i / n;
    for (int k = 1; k < n; ++k) {
      const double rho = pert.center - pert.radius + 2.0 * pert.radius * k / n;
      const double c = pert.eps * pert.jet(theta, rho).s_tr / action.density(rho);
      if (!(std::abs(c) < 0.5)) {
        std::ostringstream os;
        os << "perturbation amplitude eps = " << pert.eps
           << " too large: implicit solve contraction factor " << std::abs(c) << " >= 0.5";
        throw Error(ErrorCode::amplitude, os.str());
      }
    }
  }
}

ResonanceResult find_resonance(const std::function<double(double)>& winding, double a, double b, int p, int q,
                               std::size_t grid) {
  if (q < 1) throw Error(ErrorCode::validation, "resonance period q must be >= 1");
  if (std::gcd(std::abs(p), q) != 1) {
    std::ostringstream os;
    os << "resonance (p, q) = (" << p << ", " << q << ") is not coprime";
    throw Error(ErrorCode::validation, os.str());
  }
  ResonanceResult res;
  res.p = p;
  res.q = q;
  res.range_lo = std::numeric_limits<double>::infinity();
  res.range_hi = -res.range_lo;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / static_cast<double>(grid - 1);
    const double w = winding(x) / kTwoPi;
    res.range_lo = std::min(res.range_lo, w);
    res.range_hi = std::max(res.range_hi, w);
  }
  const double target = kTwoPi * p / q;
  res.circles = numerics::sign_change_roots([&](double x) { return winding(x) - target; }, a, b, grid, 1e-14);
  res.found = !res.circles.empty();
  return res;
}

ResonanceResult find_resonance(const CurlProfileS3& curl, double a, double b, int p, int q) {
  return find_resonance([&curl](double r) { return curl.winding(r); }, a, b, p, q);
}

ResonanceResult find_resonance_unsigned(const CurlProfileS3& curl, double a, double b, int p, int q) {
  ResonanceResult r = find_resonance(curl, a, b, std::abs(p), q);
  if (r.found || p == 0) return r;
  ResonanceResult s = find_resonance(curl, a, b, -std::abs(p), q);
  return s.found ? s : r;
}

std::size_t PeriodicSearch::fixed_point_count() const {
  std::size_t n = 0;
  for (const auto& o : orbits) n += o.points.size();
  return n;
}

PeriodicSearch find_periodic(const AnnulusMap& map, int p, int q, double c, const PeriodicSearchOptions& opt) {
  if (q < 1) throw Error(ErrorCode::validation, "period q must be >= 1");
  PeriodicSearch out;
  const double h = fd_step(map, opt.fd_step);
  const double shift = periodic_angle(map) ? kTwoPi * p : 0.0;
  const bool wrap = periodic_angle(map);
  for (std::size_t s = 0; s < opt.seeds; ++s) {
    AnnulusPoint x{kTwoPi * static_cast<double>(s) / static_cast<double>(opt.seeds), c};
    bool ok = false;
    bool degenerate = false;
    double residual = 0.0;
    for (int it = 0; it <= opt.max_iterations; ++it) {
      const AnnulusPoint y = map.power(x, q);
      if (!std::isfinite(y.rho)) break;
      const Eigen::Vector2d f(y.theta - x.theta - shift, y.rho - x.rho);
      residual = f.norm();
      const Eigen::Matrix2d jm = jacobian(map, x, q, h) - Eigen::Matrix2d::Identity();
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(jm, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const auto sv = svd.singularValues();
      degenerate = !(sv[1] > 1e-6 * sv[0]);
      if (residual < opt.tol) {
        ok = true;
        break;
      }
      if (!(sv[0] > 0.0)) break;
      Eigen::Vector2d inv_s(1.0 / sv[0], degenerate ? 0.0 : 1.0 / sv[1]);
      const Eigen::Vector2d step = -(svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose() * f);
      x.theta += step[0];
      x.rho += step[1];
      if (!(std::abs(x.rho - c) <= opt.window)) break;
    }
    if (!ok) continue;
    ++out.converged_seeds;

    PeriodicOrbit orbit;
    orbit.p = p;
    orbit.q = q;
    orbit.residual = residual;
    orbit.degenerate = degenerate;
    AnnulusPoint y = x;
    double sum_rho = 0.0;
    for (int k = 0; k < q; ++k) {
      orbit.points.push_back({wrap ? reduce_angle(y.theta) : y.theta, y.rho});
      sum_rho += y.rho;
      y = map(y);
    }
    orbit.winding = y.theta - x.theta;
    orbit.mean_rho = sum_rho / q;

    bool duplicate = false;
    for (const auto& known : out.orbits) {
      for (const auto& z : known.points) {
        if (displacement(map, orbit.points.front(), z).norm() < 1e-7) {
          duplicate = true;
          break;
        }
      }
      if (duplicate) break;
    }
    if (!duplicate) out.orbits.push_back(std::move(orbit));
    out.degenerate = out.degenerate || degenerate;
  }
  out.found = !out.orbits.empty();
  std::ostringstream diag;
  if (!out.found) diag << "Newton did not converge from any of " << opt.seeds << " seeds";
  if (out.degenerate) diag << "monodromy minus identity is singular: a whole circle is periodic";
  out.diagnosis = diag.str();
  return out;
}

std::string_view to_string(FixedPointVerdict v) {
  switch (v) {
    case FixedPointVerdict::elliptic_nondegenerate: return "elliptic-nondegenerate";
    case FixedPointVerdict::elliptic_resonant: return "elliptic-resonant";
    case FixedPointVerdict::elliptic_degenerate_twist: return "elliptic-degenerate-twist";
    case FixedPointVerdict::hyperbolic: return "hyperbolic";
    case FixedPointVerdict::parabolic: return "parabolic";
  }
  return "?";
}

FixedPointClass classify_monodromy(const Eigen::Matrix2d& m) {
  FixedPointClass fc;
  fc.trace = m.trace();
  fc.det = m.determinant();
  const double tr = fc.trace;
  if (std::abs(tr) > 2.0 + 1e-9) {
    fc.verdict = FixedPointVerdict::hyperbolic;
    const double disc = std::max(0.0, tr * tr - 4.0 * fc.det);
    fc.lambda = (tr + std::copysign(std::sqrt(disc), tr)) / 2.0;
  } else if (std::abs(tr - 2.0) < 1e-6) {
    fc.verdict = FixedPointVerdict::parabolic;
    fc.lambda = 1.0;
  } else {
    fc.verdict = FixedPointVerdict::elliptic_degenerate_twist;
    const double disc = std::max(0.0, 4.0 * fc.det - tr * tr);
    fc.lambda = std::complex<double>(tr / 2.0, std::sqrt(disc) / 2.0);
    const double omega0 = std::arg(fc.lambda);
    // Complex eigenvector v = a + i b; with P = [a, −b], m = P R(ω) P⁻¹.
    Eigen::Vector2cd v;
    if (std::abs(m(0, 1)) >= std::abs(m(1, 0)))
      v << std::complex<double>(m(0, 1)), fc.lambda - m(0, 0);
    else
      v << fc.lambda - m(1, 1), std::complex<double>(m(1, 0));
    Eigen::Matrix2d frame;
    frame.col(0) = v.real();
    frame.col(1) = -v.imag();
    double d = frame.determinant();
    fc.omega = omega0;
    if (d < 0.0) {
      frame.col(1) = v.imag();
      fc.omega = -omega0;
      d = -d;
    }
    if (d > 0.0) frame /= std::sqrt(d);
    fc.frame = frame;
  }
  for (int k = 1; k <= 4; ++k) fc.resonance[k - 1] = std::abs(std::pow(fc.lambda, k) - 1.0) < 1e-4;
  if (fc.elliptic() && std::any_of(fc.resonance.begin(), fc.resonance.end(), [](bool b) { return b; }))
    fc.verdict = FixedPointVerdict::elliptic_resonant;
  return fc;
}

FixedPointClass classify(const AnnulusMap& map, const PeriodicOrbit& orbit, const ClassifyOptions& opt) {
  if (orbit.points.empty()) throw Error(ErrorCode::validation, "periodic orbit has no points");
  const double h = fd_step(map, opt.fd_step);
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  AnnulusPoint x = orbit.points.front();
  for (int k = 0; k < orbit.q; ++k) {
    m = jacobian(map, x, 1, h) * m;
    x = map(x);
  }
  FixedPointClass fc = classify_monodromy(m);
  fc.point = orbit.points.front();
  fc.p = orbit.p;
  fc.q = orbit.q;
  if (fc.verdict == FixedPointVerdict::elliptic_degenerate_twist && opt.fit_twist) {
    fc.twist = twist_fit(map, fc.point, orbit.q, fc.frame, opt.twist);
    if (fc.twist->ok) {
      fc.alpha = fc.twist->alpha;
      fc.alpha_sigma = fc.twist->alpha_sigma;
      if (std::abs(fc.alpha) > 3.0 * fc.alpha_sigma) fc.verdict = FixedPointVerdict::elliptic_nondegenerate;
    }
  }
  return fc;
}

TwistFit twist_fit(const AnnulusMap& map, const AnnulusPoint& center, int q, const Eigen::Matrix2d& frame,
                   const TwistFitOptions& opt) {
  TwistFit fit;
  const Eigen::Matrix2d inv = frame.inverse();
  std::ostringstream diag;
  for (int k = 0; k < opt.radii; ++k) {
    const double r = opt.r_max * std::pow(opt.ratio, k);
    const Eigen::Vector2d seed = frame * Eigen::Vector2d(r, 0.0);
    AnnulusPoint y{center.theta + seed[0], center.rho + seed[1]};
    std::vector<double> inc;
    inc.reserve(opt.iterations);
    double prev_angle = std::atan2(0.0, r);
    double sum_r2 = 0.0;
    bool lost = false;
    for (std::size_t i = 0; i < opt.iterations; ++i) {
      y = map.power(y, q);
      if (!std::isfinite(y.rho)) {
        lost = true;
        break;
      }
      const Eigen::Vector2d xi = inv * displacement(map, y, center);
      if (!(xi.norm() < 4.0 * opt.r_max)) {
        lost = true;
        break;
      }
      const double ang = std::atan2(xi[1], xi[0]);
      inc.push_back(std::remainder(ang - prev_angle, kTwoPi));
      prev_angle = ang;
      sum_r2 += xi.squaredNorm();
    }
    if (lost) {
      diag << "r=" << r << ": orbit left the neighbourhood; ";
      continue;
    }
    const double total = std::accumulate(inc.begin(), inc.end(), 0.0);
    if (std::abs(total) < kTwoPi) {
      diag << "r=" << r << ": orbit does not circulate; ";
      continue;
    }
    const RotationNumber rn = rotation_number_of_increments(inc);
    if (!(rn.confidence * kTwoPi < opt.rotation_tol)) {
      diag << "r=" << r << ": rotation not converged (" << rn.confidence << "); ";
      continue;
    }
    fit.radii.push_back(r);
    fit.mean_r2.push_back(sum_r2 / static_cast<double>(inc.size()));
    fit.rotation.push_back(rn.signed_value * kTwoPi);
  }
  const std::size_t n = fit.radii.size();
  if (n < 3) {
    diag << "fit failed: " << n << " usable radii";
    fit.diagnosis = diag.str();
    return fit;
  }
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = fit.mean_r2[i];
    b[i] = fit.rotation[i];
  }
  const Eigen::Matrix2d ata = a.transpose() * a;
  const Eigen::Vector2d coef = ata.ldlt().solve(a.transpose() * b);
  const Eigen::VectorXd res = a * coef - b;
  const double rss = res.squaredNorm();
  const Eigen::Matrix2d cov = ata.inverse() * (rss / static_cast<double>(std::max<std::size_t>(n - 2, 1)));
  fit.omega = coef[0];
  fit.alpha = coef[1];
  fit.omega_sigma = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.alpha_sigma = std::sqrt(std::max(0.0, cov(1, 1)));
  fit.residual = std::sqrt(rss / static_cast<double>(n));
  fit.ok = true;
  fit.diagnosis = diag.str();
  return fit;
}

}  // namespace eulab
