#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eulab/annulus_map.hpp"
#include "eulab/dynamics.hpp"
#include "eulab/twistmaps.hpp"

namespace eulab {

enum class OrbitVerdict { invariant_curve, island_chain, chaotic, escaped, undecided };

std::string_view to_string(OrbitVerdict v);

struct OrbitClass {
  OrbitVerdict verdict = OrbitVerdict::undecided;
  RotationNumber rotation;
  double fit_residual = std::numeric_limits<double>::infinity();
  /// Rational rotation p/q detected (island parent for island chains; a
  /// resonant circle for invariant curves).
  bool rational = false;
  int p = 0;
  int q = 0;
  /// Rotation of the q-th-iterate subsequence about its island centre.
  double libration_rotation = 0.0;
  double libration_confidence = std::numeric_limits<double>::infinity();
};

/// Elliptic periodic orbit used as an island centre, with its linearizing
/// frame (identity if unknown).
struct IslandCenter {
  PeriodicOrbit orbit;
  Eigen::Matrix2d frame = Eigen::Matrix2d::Identity();
};

struct OrbitClassifyOptions {
  double tol_rot = 1e-7;
  double tol_fit = 1e-5;
  int degree = 32;
  std::size_t fit_samples = 512;
  double tol_libration = 1e-6;
  /// Confidence beyond which a non-fitting orbit is called chaotic.
  double chaos_confidence = 1e-5;
  int max_island_period = 12;
  /// Largest denominator treated as a resonance of an invariant curve.
  int max_resonant_denominator = 10000;
  std::vector<IslandCenter> centers;
};

/// Decision tree: escape; converged rotation plus single-valued trig fit
/// (invariant curve); rational lock with converged libration about an
/// island centre (island chain); poor convergence without a fit (chaotic);
/// otherwise undecided.
OrbitClass classify_orbit(const AnnulusMap& map, const Orbit& orbit, const OrbitClassifyOptions& opt = {});
OrbitClass classify_orbit(const AnnulusMap& map, const AnnulusPoint& x, std::size_t n,
                          const OrbitClassifyOptions& opt = {});

/// Max deviation of a least-squares trig polynomial value(angle) of the
/// given degree, fitted on an angle-ordered subsample and evaluated on all
/// points. Infinite when the angles leave gaps the fit cannot resolve.
double trig_fit_residual(const std::vector<double>& angles, const std::vector<double>& values, int degree,
                         std::size_t samples);

/// Piecewise version of the graph test for orbits that have not yet filled
/// their curve: angle-sorted points are split wherever consecutive angles
/// differ by more than `split_gap`, and each arc gets its own least-squares
/// polynomial of degree ≤ max_degree. Infinite if an arc has fewer than 12
/// points.
double arc_fit_residual(const std::vector<double>& angles, const std::vector<double>& values, double split_gap,
                        int max_degree);

/// Best rational approximation p/q (q ≤ max_q) of x within tol, from the
/// continued-fraction convergents.
std::optional<std::pair<long, long>> rational_lock(double x, double tol, long max_q);

struct IsotopyClass {
  enum class Kind { unknot, torus_knot, t3_horizontal, other };
  Kind kind = Kind::unknot;
  int p = 0;  ///< torus knots: normalized so that 2 ≤ p < q
  int q = 0;
  std::string tag() const;
  bool nontrivial() const { return kind == Kind::torus_knot; }
  bool operator==(const IsotopyClass&) const = default;
};

/// Classes tracked individually: torus knots with q ≤ 12.
inline constexpr int kMaxTrackedPeriod = 12;

/// p = round(Δθ1_total / 2π), then torus-knot(|p|, q) when min(|p|, q) ≥ 2
/// and gcd = 1; unknot when min(|p|, q) ≤ 1; other otherwise.
IsotopyClass knot_class(double delta_theta_total, int q);
IsotopyClass knot_class_pq(int p, int q);

/// One region of a section covered by a map.
struct SectionPatch {
  AnnulusMap map;
  double radial_lo = 0.0;
  double radial_hi = 1.0;
  /// Field and section used for transit times and the flux density. Without
  /// a field the map's density is used as the weight.
  std::optional<VectorField> field;
  SectionSpec section;
  ReturnOptions ret;
  IsotopyClass base_class;
};

struct GridSpec {
  std::size_t n_angle = 200;
  std::size_t n_radial = 200;
  bool jitter = true;
};

struct KappaOptions {
  GridSpec grid;
  std::size_t iterations = 10000;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  OrbitClassifyOptions classify;
  /// Emit a precision warning when a class's standard error exceeds this
  /// fraction of the total volume (0 disables).
  double target_stderr = 0.0;
  bool keep_samples = false;
};

struct KappaClass {
  IsotopyClass cls;
  double fraction = 0.0;
  double absolute = 0.0;
  double stderr_abs = 0.0;
  std::size_t count = 0;
};

struct KappaSample {
  std::size_t patch = 0;
  std::size_t cell = 0;
  AnnulusPoint seed;
  double weight = 0.0;
  double transit = 0.0;
  OrbitClass orbit;
  std::optional<IsotopyClass> cls;
};

struct KappaEstimate {
  Space space = Space::s3;
  double total_volume = 0.0;
  double sampled_volume = 0.0;  ///< sum of all cell weights
  std::vector<KappaClass> classes;
  double unclassified = 0.0;  ///< fraction of sampled volume in no class
  std::size_t verdict_counts[5] = {0, 0, 0, 0, 0};
  GridSpec grid;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::size_t patches = 0;
  std::vector<std::string> warnings;
  std::vector<KappaSample> samples;

  const KappaClass* find(const IsotopyClass& c) const;
  /// Measure of nontrivially knotted tori.
  double lambda() const;
  double lambda_stderr() const;
};

/// Classifies the orbit of one jittered point per grid cell of every patch
/// and accumulates cell weights per isotopy class. Invariant curves count
/// toward the patch's base class unless their rotation number is rational;
/// island chains count toward the knot class of their parent orbit.
KappaEstimate kappa_estimate(const std::vector<SectionPatch>& patches, Space space, const KappaOptions& opt);

/// θ2 = 0 section of an S³ field over ρ ∈ (a, b), iterated by integration.
std::vector<SectionPatch> s3_field_patches(const VectorField& field, double a, double b,
                                           const ReturnOptions& ret = {});
/// θ2 = 0 section iterated by a given map (transits from the field).
std::vector<SectionPatch> s3_map_patches(const AnnulusMap& map, const VectorField& field, double a, double b,
                                         const ReturnOptions& ret = {});
/// Cover of T³ by x- and y-sections, choosing per z the larger of the two
/// horizontal components; the field must have no z-component.
std::vector<SectionPatch> t3_field_patches(const VectorField& field, const ReturnOptions& ret = {});

struct ProbeOptions {
  double eps0 = 0.02;  ///< outer radius of the first annulus, frame units
  int annuli = 4;
  int seeds = 8;
  std::size_t iterations = 2000;
  double tol_rot = 1e-7;
  double tol_fit = 1e-5;  ///< relative to the seed radius
  int degree = 16;
  double threshold = 0.5;
  int consecutive = 3;
};

struct StabilityReport {
  AnnulusPoint point;
  std::vector<double> inner;
  std::vector<double> outer;
  std::vector<double> fractions;
  bool evidence = false;
  std::string verdict;
  std::string diagnosis;
};

/// Dyadic annuli ε₀·2^{−j−1} < r < ε₀·2^{−j} around an elliptic point of
/// Π^q, seeded radially in its linearizing frame; reports the fraction of
/// seeds lying on invariant curves around the point.
StabilityReport stability_probe(const AnnulusMap& map, const FixedPointClass& point, const ProbeOptions& opt = {});

struct TransportRow {
  IsotopyClass cls;
  double before = 0.0;
  double after = 0.0;
  double combined_stderr = 0.0;
  bool agree = false;
};

struct TransportReport {
  std::vector<TransportRow> rows;
  bool agree = true;
  std::string diagnosis;
};

/// Per-class comparison of two estimates within two combined standard
/// errors (with a floor of 1e-12 of the total volume).
TransportReport compare_estimates(const KappaEstimate& before, const KappaEstimate& after);

/// Estimates κ for the field and its pushforward by Φ with identical grids
/// and compares them.
TransportReport transport_invariance_check(const VectorField& field, const VolumePreservingDiffeo& phi,
                                           const KappaOptions& opt, double a = 0.0, double b = 1.0,
                                           const ReturnOptions& ret = {});

}  // namespace eulab
