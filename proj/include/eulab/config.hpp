#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eulab/io.hpp"

namespace eulab {

inline constexpr int kConfigSchemaVersion = 1;

/// Volume-preserving map applied in transport checks.
struct DiffeoSpec {
  enum class Kind { identity, s3_rotation, t3_shear };
  Kind kind = Kind::identity;
  VolumePreservingDiffeo::HopfGenerator generator = VolumePreservingDiffeo::HopfGenerator::u1;
  double t = 0.0;
  std::string shear_a = "0";
  std::string shear_b = "0";
  VolumePreservingDiffeo build(Space space) const;
};

struct Tolerances {
  double integrator = 1e-10;
  double event = 1e-11;
  double rotation = 1e-7;
  double fit = 1e-5;
  double newton = 1e-11;
  double twist = 0.0;  ///< requested twist lower bound τ (0: report only)
};

/// A validated experiment description. See configs/schema.json.
struct ExperimentConfig {
  Space space = Space::s3;
  io::Profile profile = ShearProfileS3{ScalarFunction::constant(0.0), ScalarFunction::constant(0.0)};
  double a = 0.05;  ///< analysis annulus ρ ∈ (a, b) on S³
  double b = 0.95;
  std::optional<int> p;
  std::optional<int> q;
  double eps = 0.0;
  double bump_radius = 0.1;
  std::optional<double> center;  ///< default: the resonant circle
  std::vector<Harmonic> harmonics;  ///< default: one mode q harmonic
  std::size_t seeds = 16;
  std::size_t iterations = 10000;
  GridSpec grid;
  Tolerances tol;
  std::size_t suspension_grid = 64;
  std::vector<double> eps_sweep{1e-4, 1e-3, 1e-2};
  DiffeoSpec transport;
  std::uint64_t seed = 0;
  /// FNV-1a 64 of the canonical (key-sorted, compact) config JSON.
  std::string hash;

  bool has_resonance() const { return p.has_value() && q.has_value(); }
  ReturnOptions return_options() const;
};

/// Parses and validates; every problem raises a validation error naming the
/// offending key.
ExperimentConfig parse_config(const io::Json& j);
ExperimentConfig load_config(const std::string& path);

std::uint64_t fnv1a(std::string_view data);
std::string hex64(std::uint64_t v);
/// Hash of a config document, independent of key order and whitespace.
std::string config_hash(const io::Json& j);

}  // namespace eulab
