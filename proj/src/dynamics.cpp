#include "eulab/dynamics.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "eulab/errors.hpp"

namespace eulab {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using State = std::array<double, 3>;

auto make_stepper(double tol, double max_dt) {
  return odeint::make_dense_output(tol, tol, max_dt, odeint::runge_kutta_dopri5<State>());
}

double sup_norm(const Vec3& v) { return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])}); }

bool outside_guard(const VectorField& field, const State& x, double guard) {
  return field.space == Space::s3 && !(x[2] > guard && x[2] < 1.0 - guard);
}

bool is_domain_error(const Error& e) {
  return e.code() == ErrorCode::chart_domain || e.code() == ErrorCode::near_link;
}

}  // namespace

Trajectory trace(const VectorField& field, const Vec3& p0, double duration, const IntegratorOptions& opt) {
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.points.push_back(p0);
  if (duration <= 0.0) return tr;
  const double speed = sup_norm(field(p0));
  double max_dt = opt.max_dt;
  if (max_dt <= 0.0) max_dt = speed > 0.0 ? std::min(duration, kTwoPi / speed) / 32.0 : duration / 32.0;
  auto st = make_stepper(opt.tol, max_dt);
  auto sys = [&field](const State& x, State& dx, double) { dx = field(x); };
  st.initialize(p0, 0.0, max_dt);
  try {
    while (st.current_time() < duration) {
      st.do_step(sys);
      ++tr.steps;
      if (st.current_time_step() < 1e-14 * max_dt)
        throw Error(ErrorCode::stiffness, "integrator step size underflow");
      State x = st.current_state();
      double t = st.current_time();
      if (t > duration) {
        st.calc_state(duration, x);
        t = duration;
      }
      if (outside_guard(field, x, opt.guard)) {
        tr.status = Trajectory::Status::escaped;
        tr.escape_time = t;
        break;
      }
      tr.times.push_back(t);
      tr.points.push_back(x);
    }
  } catch (const Error& e) {
    if (!is_domain_error(e)) throw;
    tr.status = Trajectory::Status::escaped;
    tr.escape_time = st.current_time();
  } catch (const odeint::odeint_error& e) {
    throw Error(ErrorCode::stiffness, std::string("integrator failed: ") + e.what());
  }
  return tr;
}

SectionSpec s3_section(int direction) { return {1, 0, 2, 0.0, direction}; }
SectionSpec t3_x_section(double target, int direction) { return {0, 1, 2, target, direction}; }
SectionSpec t3_y_section(double target, int direction) { return {1, 0, 2, target, direction}; }

std::string_view to_string(ReturnResult::Status s) {
  switch (s) {
    case ReturnResult::Status::ok: return "ok";
    case ReturnResult::Status::non_return: return "non-return";
    case ReturnResult::Status::escaped: return "escaped";
    case ReturnResult::Status::section_error: return "section-error";
  }
  return "?";
}

ReturnResult return_map(const VectorField& field, const SectionSpec& sec, double angle, double radial,
                        const ReturnOptions& opt) {
  ReturnResult res;
  State p0{0.0, 0.0, 0.0};
  p0[sec.section_axis] = sec.target;
  p0[sec.angle_axis] = angle;
  p0[sec.radial_axis] = radial;
  const int s = sec.section_axis;
  const double dir = sec.direction >= 0 ? 1.0 : -1.0;

  Vec3 w0;
  try {
    w0 = field(p0);
  } catch (const Error& e) {
    if (!is_domain_error(e)) throw;
    res.status = ReturnResult::Status::escaped;
    res.diagnosis = e.what();
    return res;
  }
  const double speed0 = dir * w0[s];
  if (!(speed0 >= opt.speed_floor)) {
    res.status = ReturnResult::Status::section_error;
    std::ostringstream os;
    os << "field not transverse to the section at the seed: sectioned speed " << speed0;
    res.diagnosis = os.str();
    return res;
  }
  const double period = kTwoPi / speed0;
  const double max_dt = opt.integrator.max_dt > 0.0 ? opt.integrator.max_dt : period / 32.0;
  const double max_transit = opt.max_transit > 0.0 ? opt.max_transit : 50.0 * period;
  const double goal = sec.target + dir * kTwoPi;
  auto event = [&](const State& x) { return dir * (x[s] - goal); };

  auto st = make_stepper(opt.integrator.tol, max_dt);
  auto sys = [&field](const State& x, State& dx, double) { dx = field(x); };
  st.initialize(p0, 0.0, max_dt);
  try {
    for (;;) {
      const auto [t0, t1] = st.do_step(sys);
      if (st.current_time_step() < 1e-14 * max_dt)
        throw Error(ErrorCode::stiffness, "integrator step size underflow");
      const State& x1 = st.current_state();
      if (outside_guard(field, x1, opt.integrator.guard)) {
        res.status = ReturnResult::Status::escaped;
        res.diagnosis = "orbit reached the chart guard";
        return res;
      }
      const double f1 = event(x1);
      if (f1 >= 0.0) {
        double a = t0, fa = event(st.previous_state()), b = t1, fb = f1;
        State xc = x1;
        double tc = t1;
        for (int it = 0; it < 200 && std::abs(fb) >= opt.event_tol; ++it) {
          tc = b - fb * (b - a) / (fb - fa);
          st.calc_state(tc, xc);
          const double fc = event(xc);
          if (fc * fb < 0.0) {
            a = b;
            fa = fb;
          } else {
            fa *= 0.5;
          }
          b = tc;
          fb = fc;
          if (b == a) break;
        }
        if (std::abs(fb) >= opt.event_tol) {
          res.status = ReturnResult::Status::section_error;
          res.diagnosis = "crossing refinement did not converge";
          return res;
        }
        st.calc_state(b, xc);
        res.point = xc;
        for (int k = 0; k < 3; ++k) res.delta[k] = xc[k] - p0[k];
        res.transit = b;
        return res;
      }
      const Vec3 w1 = field(x1);
      if (!(dir * w1[s] >= opt.speed_floor)) {
        res.status = ReturnResult::Status::section_error;
        std::ostringstream os;
        os << "transversality lost during transit: sectioned speed " << dir * w1[s];
        res.diagnosis = os.str();
        return res;
      }
      if (t1 > max_transit) {
        res.status = ReturnResult::Status::non_return;
        res.diagnosis = "no return within the maximal transit time";
        return res;
      }
    }
  } catch (const Error& e) {
    if (!is_domain_error(e)) throw;
    res.status = ReturnResult::Status::escaped;
    res.diagnosis = e.what();
  } catch (const odeint::odeint_error& e) {
    throw Error(ErrorCode::stiffness, std::string("integrator failed: ") + e.what());
  }
  return res;
}

AnnulusMap analytic_return_map(const CurlProfileS3& curl, double a, double b) {
  constexpr int n = 1024;
  double prev = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = a + (b - a) * i / n;
    const double g = curl.g(r);
    if (g == 0.0 || (i > 0 && (g > 0.0) != (prev > 0.0))) {
      std::ostringstream os;
      os << "g vanishes near rho = " << r << "; section on theta1 instead";
      throw Error(ErrorCode::section, os.str());
    }
    prev = g;
  }
  return AnnulusMap(
      AnnulusMap::Kind::analytic,
      [curl](const AnnulusPoint& x) {
        const double a1 = curl.A1(x.rho), a2 = curl.A2(x.rho);
        return AnnulusPoint{x.theta + kTwoPi * (a1 + a2) / (a2 - a1), x.rho};
      },
      a, b, [curl](const AnnulusPoint& x) { return curl.g(x.rho); });
}

AnnulusMap numeric_return_map(const VectorField& field, const SectionSpec& section, double a, double b,
                              const ReturnOptions& opt) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto step = [field, section, opt, nan](const AnnulusPoint& x) {
    const ReturnResult r = return_map(field, section, x.theta, x.rho, opt);
    if (!r.ok()) return AnnulusPoint{nan, nan};
    return AnnulusPoint{x.theta + r.delta[section.angle_axis], r.point[section.radial_axis]};
  };
  auto density = [field, section](const AnnulusPoint& x) {
    Vec3 p{0.0, 0.0, 0.0};
    p[section.section_axis] = section.target;
    p[section.angle_axis] = x.theta;
    p[section.radial_axis] = x.rho;
    return volume_density(field.space) * std::abs(field(p)[section.section_axis]);
  };
  return AnnulusMap(AnnulusMap::Kind::numeric, step, a, b, density);
}

}  // namespace eulab
