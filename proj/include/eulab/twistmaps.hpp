#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eulab/annulus_map.hpp"
#include "eulab/steady.hpp"

namespace eulab {

/// Action variable of an annulus map's invariant area form: G′ = density.
struct ActionCoordinate {
  std::function<double(double)> action;
  std::function<double(double)> density;
};

/// G(ρ) = 2ρ(f1 + f2), density g(ρ), for the θ2 = 0 section of a shear curl.
ActionCoordinate action_coordinate(const CurlProfileS3& curl);
/// G(ρ) = ρ, density 1.
ActionCoordinate uniform_action();

/// Mode of the angular factor: amplitude · cos(mode·θ + phase).
struct Harmonic {
  int mode = 1;
  double amplitude = 1.0;
  double phase = 0.0;
};

template <class T>
struct SigmaJet {
  T s, s_t, s_r, s_tr, s_rr;
};

/// Generating perturbation σ(θ, ρ) = Σ a cos(mθ + φ) · χ((ρ − c)/r) with the
/// C² bump χ(x) = (1 − x²)³ on |x| < 1. The map φ_ε it generates is defined
/// in the action variable P = G(ρ) by the type-2 generating function
/// θP + ε σ(θ, ρ(P)).
struct GeneratingPerturbation {
  double eps = 0.0;
  double center = 0.5;
  double radius = 0.1;
  std::vector<Harmonic> harmonics;
  /// Absolute tolerance of the implicit solves.
  double tol = 1e-13;

  /// cos(qθ) on a bump of the given radius around c.
  static GeneratingPerturbation standard(double eps, int q, double center, double radius = 0.1);

  bool in_support(double rho) const { return std::abs(rho - center) < radius; }

  template <class T>
  SigmaJet<T> jet(const T& theta, const T& rho) const {
    using std::cos;
    using std::sin;
    SigmaJet<T> j{T(0.0), T(0.0), T(0.0), T(0.0), T(0.0)};
    const T x = (rho - center) / radius;
    const double xv = (rho_value(rho) - center) / radius;
    if (!(std::abs(xv) < 1.0)) return j;
    const T w = 1.0 - x * x;
    const T chi = w * w * w;
    const T chi1 = -6.0 * x * w * w / radius;
    const T chi2 = w * (30.0 * x * x - 6.0) / (radius * radius);
    for (const Harmonic& h : harmonics) {
      const T arg = static_cast<double>(h.mode) * theta + h.phase;
      const T c = h.amplitude * cos(arg);
      const T s = (-h.amplitude * h.mode) * sin(arg);
      j.s = j.s + c * chi;
      j.s_t = j.s_t + s * chi;
      j.s_r = j.s_r + c * chi1;
      j.s_tr = j.s_tr + s * chi1;
      j.s_rr = j.s_rr + c * chi2;
    }
    return j;
  }

 private:
  static double rho_value(double r) { return r; }
  template <class T>
  static double rho_value(const T& r) {
    return r.v;
  }
};

/// φ_ε: solves G(ρ) = G(ρ′) + εσ_θ(θ, ρ′) for ρ′ by Newton and sets
/// θ′ = θ + εσ_ρ(θ, ρ′)/g(ρ′). Identity outside the bump. Throws an
/// amplitude error when |εσ_θρ/g| ≥ 0.5 or Newton stalls.
AnnulusPoint generating_step(const GeneratingPerturbation& pert, const ActionCoordinate& action,
                             const AnnulusPoint& x);

/// Π = Π0 ∘ φ_ε.
AnnulusMap perturb(const AnnulusMap& base, const GeneratingPerturbation& pert, const ActionCoordinate& action);

/// Pre-flight contraction check of the implicit solve over a grid of the
/// bump; throws the amplitude error perturb() would raise lazily.
void check_amplitude(const GeneratingPerturbation& pert, const ActionCoordinate& action);

struct ResonanceResult {
  bool found = false;
  int p = 0;
  int q = 1;
  std::vector<double> circles;  ///< all c in (a, b) with W(c) = 2πp/q
  double range_lo = 0.0;        ///< range of W/2π sampled on [a, b]
  double range_hi = 0.0;
};

/// Resonant circles W(c) = 2πp/q (signed p). Throws a validation error if
/// q < 1 or gcd(|p|, q) ≠ 1.
ResonanceResult find_resonance(const std::function<double(double)>& winding, double a, double b, int p, int q,
                               std::size_t grid = 4096);
ResonanceResult find_resonance(const CurlProfileS3& curl, double a, double b, int p, int q);
/// Tries p and −p; convenient when only |p|/q is known.
ResonanceResult find_resonance_unsigned(const CurlProfileS3& curl, double a, double b, int p, int q);

struct PeriodicOrbit {
  int p = 0;
  int q = 1;
  std::vector<AnnulusPoint> points;  ///< q points, angles reduced into [0, 2π)
  double winding = 0.0;              ///< unreduced angle advance over q steps
  double residual = 0.0;             ///< ‖Π^q(x0) − x0 − (2πp, 0)‖
  double mean_rho = 0.0;
  bool degenerate = false;  ///< Jacobian of Π^q − id had rank < 2
};

struct PeriodicSearchOptions {
  std::size_t seeds = 32;
  double window = 0.05;  ///< Newton iterates must stay within |ρ − c| ≤ window
  double tol = 1e-11;
  int max_iterations = 40;
  double fd_step = 0.0;  ///< 0: 1e-6 × annulus width
};

struct PeriodicSearch {
  bool found = false;
  bool degenerate = false;
  std::size_t converged_seeds = 0;
  std::vector<PeriodicOrbit> orbits;
  std::string diagnosis;
  std::size_t fixed_point_count() const;
};

/// Newton (SVD pseudo-inverse) on Π^q(x) − x − (2πp, 0) from seeds spread
/// over the circle ρ = c, with orbit-level deduplication.
PeriodicSearch find_periodic(const AnnulusMap& map, int p, int q, double c, const PeriodicSearchOptions& opt = {});

struct TwistFitOptions {
  double r_max = 1e-2;   ///< largest radius in frame units
  int radii = 8;         ///< geometric schedule r_max · ratio^k
  double ratio = 0.75;
  std::size_t iterations = 2000;  ///< iterations of Π^q per radius
  double rotation_tol = 1e-8;
};

struct TwistFit {
  bool ok = false;
  std::vector<double> radii;
  std::vector<double> mean_r2;
  std::vector<double> rotation;  ///< radians per iteration of Π^q
  double omega = 0.0;
  double alpha = 0.0;
  double omega_sigma = 0.0;
  double alpha_sigma = 0.0;
  double residual = 0.0;
  std::string diagnosis;
};

/// Measures the rotation of orbits seeded at frame radius r about `center`
/// and fits ω + α·mean(r²). `frame` maps linearizing coordinates to map
/// coordinates (θ, ρ).
TwistFit twist_fit(const AnnulusMap& map, const AnnulusPoint& center, int q, const Eigen::Matrix2d& frame,
                   const TwistFitOptions& opt = {});

enum class FixedPointVerdict {
  elliptic_nondegenerate,
  elliptic_resonant,
  elliptic_degenerate_twist,
  hyperbolic,
  parabolic,
};

std::string_view to_string(FixedPointVerdict v);

struct FixedPointClass {
  AnnulusPoint point;
  int p = 0;
  int q = 1;
  std::complex<double> lambda;
  double trace = 0.0;
  double det = 0.0;
  double omega = 0.0;  ///< rotation angle in the oriented frame
  std::array<bool, 4> resonance{};
  double alpha = 0.0;
  double alpha_sigma = 0.0;
  FixedPointVerdict verdict = FixedPointVerdict::parabolic;
  Eigen::Matrix2d frame = Eigen::Matrix2d::Identity();
  std::optional<TwistFit> twist;

  bool elliptic() const {
    return verdict == FixedPointVerdict::elliptic_nondegenerate || verdict == FixedPointVerdict::elliptic_resonant ||
           verdict == FixedPointVerdict::elliptic_degenerate_twist;
  }
};

struct ClassifyOptions {
  bool fit_twist = true;
  TwistFitOptions twist;
  double fd_step = 0.0;  ///< 0: 1e-6 × annulus width
};

/// Linear stability from the finite-difference monodromy DΠ^q (chained
/// along the orbit), resonance flags |λ^k − 1| < 1e-4 for k = 1..4, and the
/// twist constant when elliptic and nonresonant.
FixedPointClass classify(const AnnulusMap& map, const PeriodicOrbit& orbit, const ClassifyOptions& opt = {});

/// Stability data from a monodromy matrix alone (no twist fit).
FixedPointClass classify_monodromy(const Eigen::Matrix2d& m);

}  // namespace eulab
