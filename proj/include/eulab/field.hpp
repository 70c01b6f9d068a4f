#pragma once

#include <functional>

#include "eulab/geometry.hpp"

namespace eulab {

/// A vector field given by its chart components. On S³ the chart is
/// (θ1, θ2, ρ); on T³ it is (x, y, z). Evaluation must be thread-safe.
struct VectorField {
  Space space = Space::s3;
  std::function<Vec3(const Vec3&)> eval;

  Vec3 operator()(const Vec3& p) const { return eval(p); }
};

/// v(p) = DΦ(Φ⁻¹(p)) · w(Φ⁻¹(p)).
VectorField pushforward_field(VectorField w, VolumePreservingDiffeo phi);

VectorField reversed(VectorField w);

/// Chart divergence (constant volume density on both spaces), fourth-order
/// central differences with step h.
double chart_divergence(const VectorField& w, const Vec3& p, double h = 1e-4);

/// Chart Lie bracket [X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i.
Vec3 lie_bracket(const VectorField& x, const VectorField& y, const Vec3& p, double h = 1e-4);

}  // namespace eulab
