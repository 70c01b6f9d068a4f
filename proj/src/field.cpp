#include "eulab/field.hpp"

namespace eulab {

namespace {

Mat3 jacobian_fd(const VectorField& w, const Vec3& p, double h) {
  Mat3 j{};
  for (int k = 0; k < 3; ++k) {
    auto at = [&](double s) {
      Vec3 q = p;
      q[k] += s;
      return w(q);
    };
    const Vec3 a = at(2 * h), b = at(h), c = at(-h), d = at(-2 * h);
    for (int i = 0; i < 3; ++i) j[i][k] = (-a[i] + 8 * b[i] - 8 * c[i] + d[i]) / (12 * h);
  }
  return j;
}

}  // namespace

VectorField pushforward_field(VectorField w, VolumePreservingDiffeo phi) {
  const Space s = w.space;
  return {s, [w = std::move(w), phi = std::move(phi)](const Vec3& p) {
            const Vec3 q = phi.inverse(p);
            return phi.pushforward_vector(q, w(q));
          }};
}

VectorField reversed(VectorField w) {
  const Space s = w.space;
  return {s, [w = std::move(w)](const Vec3& p) {
            const Vec3 v = w(p);
            return Vec3{-v[0], -v[1], -v[2]};
          }};
}

double chart_divergence(const VectorField& w, const Vec3& p, double h) {
  const Mat3 j = jacobian_fd(w, p, h);
  return j[0][0] + j[1][1] + j[2][2];
}

Vec3 lie_bracket(const VectorField& x, const VectorField& y, const Vec3& p, double h) {
  const Mat3 jx = jacobian_fd(x, p, h), jy = jacobian_fd(y, p, h);
  const Vec3 xv = x(p), yv = y(p);
  const Vec3 a = mat_vec(jy, xv), b = mat_vec(jx, yv);
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

}  // namespace eulab
