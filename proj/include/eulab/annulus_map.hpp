#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace eulab {

/// Point of the annulus S¹×(a,b). `theta` is unreduced. Planar model maps
/// reuse the two slots as Cartesian (x, y).
struct AnnulusPoint {
  double theta = 0.0;
  double rho = 0.0;
};

/// Area-preserving map of an annulus. One step returns the image with the
/// angle carried continuously, so image.theta − x.theta is the winding of
/// the step. Images that leave the annulus (or NaN, used by numeric maps to
/// signal a failed return) count as escapes.
class AnnulusMap {
 public:
  enum class Kind { analytic, generating, numeric, model };
  using Step = std::function<AnnulusPoint(const AnnulusPoint&)>;
  /// Density of the invariant area form at a point.
  using Density = std::function<double(const AnnulusPoint&)>;

  AnnulusMap(Kind kind, Step step, double lower, double upper, Density density = {});

  AnnulusPoint operator()(const AnnulusPoint& x) const { return step_(x); }

  Kind kind() const { return kind_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  /// Width used to scale finite-difference steps; 1 for unbounded models.
  double scale() const;
  bool contains(const AnnulusPoint& x) const { return x.rho > lower_ && x.rho < upper_; }
  double density(const AnnulusPoint& x) const { return density_ ? density_(x) : 1.0; }
  /// Generating-function and analytic twist maps satisfy the intersection
  /// property by construction.
  bool exact() const { return kind_ == Kind::analytic || kind_ == Kind::generating; }

  /// q-fold composition (NaN once an intermediate image escapes).
  AnnulusPoint power(const AnnulusPoint& x, int q) const;

 private:
  Kind kind_;
  Step step_;
  double lower_;
  double upper_;
  Density density_;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

AnnulusMap rigid_rotation(double angle, double lower = 0.0, double upper = 1.0);
/// (θ, ρ) ↦ (θ + W(ρ), ρ).
AnnulusMap twist_map(std::function<double(double)> winding, double lower, double upper,
                     AnnulusMap::Density density = {});
/// Planar map given in Cartesian coordinates; unbounded domain.
AnnulusMap planar_map(std::function<Eigen::Vector2d(const Eigen::Vector2d&)> fn);
/// Integrable model (r, φ) ↦ (r, φ + ω + α r²) written in Cartesian form.
AnnulusMap polar_twist_model(double omega, double alpha);
/// Area-preserving quadratic map (x, y) ↦ R(angle)·(x, y − x²).
AnnulusMap quadratic_henon(double angle);

struct Orbit {
  std::vector<AnnulusPoint> points;  ///< seed first, then its images
  bool escaped = false;
  std::size_t exit_index = 0;  ///< step at which the orbit left the annulus
  std::size_t steps() const { return points.empty() ? 0 : points.size() - 1; }
};

Orbit iterate(const AnnulusMap& map, const AnnulusPoint& x, std::size_t n);

struct RotationNumber {
  double value = 0.0;         ///< mean winding per step / 2π, reduced into [0, 1)
  double signed_value = 0.0;  ///< same, unreduced
  double confidence = std::numeric_limits<double>::infinity();
  bool partial = false;  ///< orbit escaped before the requested length
  bool flagged = true;   ///< partial, or confidence worse than the flag threshold
  std::size_t iterations = 0;
};

/// Smooth-weight Birkhoff average of per-step angle increments (radians).
/// Confidence is |estimate(N) − estimate(N/2)| / 2π.
RotationNumber rotation_number_of_increments(const std::vector<double>& increments,
                                             double flag_threshold = 1e-3);
RotationNumber rotation_number(const Orbit& orbit, double flag_threshold = 1e-3);
RotationNumber rotation_number(const AnnulusMap& map, const AnnulusPoint& x, std::size_t n,
                               double flag_threshold = 1e-3);

/// Central-difference Jacobian of Π^q with step h.
Eigen::Matrix2d jacobian(const AnnulusMap& map, const AnnulusPoint& x, int q, double h);

/// |det DΠ · density(Π x) / density(x) − 1|.
double area_residual(const AnnulusMap& map, const AnnulusPoint& x, double h);

struct IntersectionCheck {
  bool intersects = false;
  double min_displacement = 0.0;
  double max_displacement = 0.0;
};

/// Radial displacement of the circle ρ = const sampled at n angles; an exact
/// map must produce a sign change or vanish identically.
IntersectionCheck intersection_check(const AnnulusMap& map, double rho, std::size_t n = 512);

}  // namespace eulab
