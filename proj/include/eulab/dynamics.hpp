#pragma once

#include <string>
#include <vector>

#include "eulab/annulus_map.hpp"
#include "eulab/field.hpp"
#include "eulab/steady.hpp"

namespace eulab {

struct IntegratorOptions {
  double tol = 1e-10;  ///< absolute and relative per-step tolerance
  /// Largest step; 0 means 1/32 of the nominal period 2π/|speed| at the start.
  double max_dt = 0.0;
  double guard = kChartGuard;  ///< S³ only: escape when ρ leaves (guard, 1 − guard)
};

struct Trajectory {
  enum class Status { ok, escaped };
  Status status = Status::ok;
  std::vector<double> times;
  std::vector<Vec3> points;  ///< unreduced chart coordinates at accepted steps
  std::size_t steps = 0;
  double escape_time = 0.0;
};

/// Adaptive Dormand–Prince integration of a chart field over [0, T].
/// Throws a stiffness error if the step size underflows.
Trajectory trace(const VectorField& field, const Vec3& p0, double duration, const IntegratorOptions& opt = {});

/// Section {x[section_axis] = target (mod 2π)} crossed with the given
/// direction; `angle_axis` and `radial_axis` parametrize the section.
struct SectionSpec {
  int section_axis = 1;
  int angle_axis = 0;
  int radial_axis = 2;
  double target = 0.0;
  int direction = 1;
};

/// θ2 = 0 on S³, crossed with increasing θ2.
SectionSpec s3_section(int direction = 1);
/// x = target on T³ (angle y, radial z) or y = target (angle x, radial z).
SectionSpec t3_x_section(double target = 0.0, int direction = 1);
SectionSpec t3_y_section(double target = 0.0, int direction = 1);

struct ReturnOptions {
  IntegratorOptions integrator;
  double speed_floor = 1e-4;  ///< transversality floor for the sectioned speed
  double max_transit = 0.0;   ///< 0: 50 × 2π/|sectioned speed at the start|
  double event_tol = 1e-11;
};

struct ReturnResult {
  enum class Status { ok, non_return, escaped, section_error };
  Status status = Status::ok;
  Vec3 point{};  ///< full chart point at the crossing, unreduced
  Vec3 delta{};  ///< unreduced coordinate changes over the transit
  double transit = 0.0;
  std::string diagnosis;
  bool ok() const { return status == Status::ok; }
};

std::string_view to_string(ReturnResult::Status s);

/// First return of the point with section coordinate `target`, angle
/// `angle`, radial coordinate `radial` (remaining coordinate zero).
ReturnResult return_map(const VectorField& field, const SectionSpec& section, double angle, double radial,
                        const ReturnOptions& opt = {});

/// Exact twist map Π0(θ1, ρ) = (θ1 + 2πf/g, ρ) of the θ2 = 0 section with
/// invariant density g. Throws a section error when g vanishes on [a, b].
AnnulusMap analytic_return_map(const CurlProfileS3& curl, double a, double b);

/// Return map computed by integration; failed returns yield NaN (escape).
/// The invariant density is J·|w_section|.
AnnulusMap numeric_return_map(const VectorField& field, const SectionSpec& section, double a, double b,
                              const ReturnOptions& opt = {});

}  // namespace eulab
