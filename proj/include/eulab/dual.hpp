#pragma once

#include <cmath>

namespace eulab {

/// Forward-mode dual number with a two-component gradient. Enough arithmetic
/// for differentiating the suspended field exactly in (θ1, ρ).
struct Dual {
  double v = 0.0;
  double d[2] = {0.0, 0.0};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
  Dual(double value, double d0, double d1) : v(value), d{d0, d1} {}

  static Dual variable(double value, int slot) {
    Dual r(value);
    r.d[slot] = 1.0;
    return r;
  }
};

inline Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d[0] + b.d[0], a.d[1] + b.d[1]}; }
inline Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d[0] - b.d[0], a.d[1] - b.d[1]}; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d[0], -a.d[1]}; }
inline Dual operator*(const Dual& a, const Dual& b) {
  return {a.v * b.v, a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1]};
}
inline Dual operator/(const Dual& a, const Dual& b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.d[0] - q * b.d[0]) * inv, (a.d[1] - q * b.d[1]) * inv};
}
inline Dual operator+(const Dual& a, double b) { return {a.v + b, a.d[0], a.d[1]}; }
inline Dual operator+(double a, const Dual& b) { return b + a; }
inline Dual operator-(const Dual& a, double b) { return {a.v - b, a.d[0], a.d[1]}; }
inline Dual operator-(double a, const Dual& b) { return {a - b.v, -b.d[0], -b.d[1]}; }
inline Dual operator*(const Dual& a, double b) { return {a.v * b, a.d[0] * b, a.d[1] * b}; }
inline Dual operator*(double a, const Dual& b) { return b * a; }
inline Dual operator/(const Dual& a, double b) { return a * (1.0 / b); }
inline Dual operator/(double a, const Dual& b) { return Dual(a) / b; }

inline Dual cos(const Dual& a) {
  const double s = -std::sin(a.v);
  return {std::cos(a.v), s * a.d[0], s * a.d[1]};
}
inline Dual sin(const Dual& a) {
  const double c = std::cos(a.v);
  return {std::sin(a.v), c * a.d[0], c * a.d[1]};
}

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

/// Lifts a scalar function with known derivative through a dual argument.
inline double chain(double, double value, double) { return value; }
inline Dual chain(const Dual& x, double value, double slope) {
  return {value, slope * x.d[0], slope * x.d[1]};
}

}  // namespace eulab
