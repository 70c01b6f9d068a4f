#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eulab/field.hpp"
#include "eulab/function.hpp"
#include "eulab/geometry.hpp"

namespace eulab {

/// u = f1(ρ) u1 + f2(ρ) u2 on S³.
struct ShearProfileS3 {
  ScalarFunction f1;
  ScalarFunction f2;
};

/// u = f(z) ∂x + g(z) ∂y on T³; f and g are 2π-periodic.
struct ShearProfileT3 {
  ScalarFunction f;
  ScalarFunction g;
};

/// Checks f(0) = f(2π), g(0) = g(2π) within 1e-12 and throws otherwise.
void validate_periodic(const ShearProfileT3& prof);

/// Vorticity of a shear flow on S³: rot u = A1 u1 + A2 u2 = f ∂θ1 + g ∂θ2.
class CurlProfileS3 {
 public:
  explicit CurlProfileS3(ShearProfileS3 prof) : prof_(std::move(prof)) {}

  /// Coefficient functions and their derivatives (order 0..2).
  double A1(double rho, int order = 0) const;
  double A2(double rho, int order = 0) const;
  double f(double rho, int order = 0) const { return A1(rho, order) + A2(rho, order); }
  double g(double rho, int order = 0) const { return A2(rho, order) - A1(rho, order); }

  /// ∫₀^ρ g = 2ρ (f1 + f2): the action coordinate of the θ2 = 0 section.
  double action(double rho) const;

  /// Twist angle W = 2π f/g of the θ2 = 0 return map and its derivative.
  double winding(double rho) const;
  double winding_derivative(double rho) const;

  const ShearProfileS3& profile() const { return prof_; }

 private:
  ShearProfileS3 prof_;
};

/// rot u = F ∂x + G ∂y with F = −g′, G = f′.
class CurlProfileT3 {
 public:
  explicit CurlProfileT3(ShearProfileT3 prof) : prof_(std::move(prof)) {}

  double F(double z, int order = 0) const { return -prof_.g.eval(z, order + 1); }
  double G(double z, int order = 0) const { return prof_.f.eval(z, order + 1); }

  const ShearProfileT3& profile() const { return prof_; }

 private:
  ShearProfileT3 prof_;
};

/// Bernoulli function as a function of ρ (S³) or z (T³), normalized B(0)=0.
class BernoulliProfile {
 public:
  double value(double x) const;
  double derivative(double x) const;
  double second_derivative(double x) const;
  /// Constant removed by the normalization, so that raw = value + offset.
  double offset() const { return offset_; }
  Space space() const { return space_; }

 private:
  friend BernoulliProfile bernoulli(const ShearProfileS3&);
  friend BernoulliProfile bernoulli_t3(const ShearProfileT3&);

  Space space_ = Space::s3;
  std::optional<ShearProfileS3> s3_;
  std::optional<ShearProfileT3> t3_;
  double offset_ = 0.0;
};

enum class MorseBottVerdict { ok, failed, inconclusive };

std::string_view to_string(MorseBottVerdict v);

struct CriticalSet {
  double location = 0.0;  ///< ρ (S³; 0 and 1 are the link components) or z (T³)
  double value = 0.0;     ///< normalized Bernoulli value
  double hessian = 0.0;   ///< normal Hessian eigenvalue
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct NondegeneracyReport {
  MorseBottVerdict morse_bott = MorseBottVerdict::failed;
  std::vector<CriticalSet> critical;
  /// Infimum of the twist quantity sampled on the grid (on Ω_τ for T³).
  double twist_min = 0.0;
  /// Certified lower bound: grid minimum minus spacing × Lipschitz bound.
  double tau = 0.0;
  double tau_request = 0.0;
  double lipschitz = 0.0;
  std::vector<Interval> omega_tau;  ///< T³ only
  std::vector<double> twist_zeros;  ///< T³ only
  bool nondegenerate = false;
  std::string diagnosis;
};

struct NondegeneracyOptions {
  std::size_t grid = 4096;
  /// Lipschitz bound of the twist quantity; estimated from its derivative
  /// (×1.25) when absent.
  std::optional<double> lipschitz;
  /// Relative threshold below which a near-zero of 𝓑′ (or 𝓑″ at a critical
  /// point) is not resolved.
  double resolution = 1e-8;
};

Vec3 eval_field(const ShearProfileS3& prof, const ChartPointS3& p);
Vec3 eval_field_t3(const ShearProfileT3& prof, const Vec3& p);

CurlProfileS3 curl(const ShearProfileS3& prof);
CurlProfileT3 curl_t3(const ShearProfileT3& prof);

/// Vorticity computed through the dual 1-form: α = u♭, then i_ω μ = dα.
/// Independent of the closed formula used by CurlProfileS3.
Vec3 curl_via_dual_form(const ShearProfileS3& prof, double rho);

BernoulliProfile bernoulli(const ShearProfileS3& prof);
BernoulliProfile bernoulli_t3(const ShearProfileT3& prof);

/// Integrand of the S³ Bernoulli formula, i.e. d𝓑/dρ.
double bernoulli_integrand(const ShearProfileS3& prof, double rho);

NondegeneracyReport check_nondegenerate_s3(const ShearProfileS3& prof, double tau_request,
                                           const NondegeneracyOptions& opt = {});
NondegeneracyReport check_nondegenerate_t3(const ShearProfileT3& prof, double tau_request,
                                           const NondegeneracyOptions& opt = {});

/// max over points of |u × rot u − ∇𝓑| measured with the induced metric.
double bernoulli_identity_residual(const ShearProfileS3& prof, std::span<const ChartPointS3> points);
double bernoulli_identity_residual_t3(const ShearProfileT3& prof, std::span<const Vec3> points);

VectorField shear_field(const ShearProfileS3& prof);
VectorField shear_field_t3(const ShearProfileT3& prof);
VectorField curl_field(const CurlProfileS3& curl);
VectorField curl_field_t3(const CurlProfileT3& curl);

}  // namespace eulab
