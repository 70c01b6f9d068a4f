#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "eulab/dynamics.hpp"
#include "eulab/field.hpp"
#include "eulab/steady.hpp"
#include "eulab/twistmaps.hpp"

namespace eulab {

/// Temporal bump in θ2: 693/(256π)·(1 − x²)⁵ with x = (θ2 − π)/(π/2),
/// supported in (π/2, 3π/2), unit integral. Four continuous derivatives
/// keep adaptive step control honest across the support edges.
double temporal_bump(double tau);
/// ∫₀^τ of the bump, rising from 0 to 1 across the support.
double temporal_bump_integral(double tau);

/// Divergence-free field on the S³ chart whose θ2 = 0 return map is
/// Π0 ∘ φ_ε, Π0 being the twist map of the base curl field w = (f, g, 0).
///
/// Along a transit we write the point as y = R_τ(x) with R_τ the flow of w
/// from θ2 = 0 to θ2 = τ, and let x follow the ε-scaled isotopy of φ: the
/// generating-function family φ_{εX(τ)} with X the integral of the
/// temporal bump. The resulting vector field is w plus g·DR_τ·Y where Y is
/// the (area-preserving) velocity of the isotopy, so the field keeps
/// θ2-speed g(ρ) and equals w wherever the bump or the perturbation
/// vanishes.
class SuspendedField {
 public:
  SuspendedField(CurlProfileS3 base, GeneratingPerturbation pert);

  Vec3 operator()(const Vec3& p) const;
  Vec3 base(const Vec3& p) const;
  /// Chart divergence by forward-mode differentiation (exact up to rounding).
  double divergence(const Vec3& p) const;
  /// False where the field coincides with the base field by construction.
  bool perturbed_at(const Vec3& p) const;

  VectorField field() const;
  VectorField base_field() const;
  const GeneratingPerturbation& perturbation() const { return pert_; }
  const CurlProfileS3& curl() const { return curl_; }
  /// Π0 ∘ φ_ε on (a, b), the map the field is built to realize.
  AnnulusMap target_map(double a, double b) const;
  /// Minimum of the θ2-component over ρ ∈ [a, b].
  double transversality_floor(double a, double b) const;

 private:
  template <class T>
  std::array<T, 3> eval(const T& theta1, double theta2, const T& rho) const;

  CurlProfileS3 curl_;
  GeneratingPerturbation pert_;
  ActionCoordinate action_;
};

/// Checks amplitude, transversality and that the perturbation vanishes near
/// ∂A(a, b) before building the field.
SuspendedField suspend(const CurlProfileS3& base, const GeneratingPerturbation& pert, double a, double b);

struct SuspensionCheckOptions {
  std::size_t n_theta = 64;
  std::size_t n_rho = 64;
  double rho_lo = 0.05;
  double rho_hi = 0.95;
  ReturnOptions ret;
  std::size_t threads = 1;
};

struct SuspensionReport {
  double sup = 0.0;
  double rms = 0.0;
  std::size_t cells = 0;
  std::vector<std::size_t> flagged;  ///< cells whose return failed
  double field_deviation = 0.0;      ///< sup |ŵ − w| on a 16³ chart grid
  double map_deviation = 0.0;        ///< sup |Π − Π0| on the verification grid
  double ratio = 0.0;                ///< field_deviation / map_deviation
};

/// Compares the integrated return map of ŵ with Π on a grid of cell
/// centres over S¹ × [rho_lo, rho_hi].
SuspensionReport verify_suspension(const SuspendedField& field, const AnnulusMap& target,
                                   const SuspensionCheckOptions& opt = {});

}  // namespace eulab
