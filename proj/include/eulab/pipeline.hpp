#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "eulab/config.hpp"
#include "eulab/io.hpp"
#include "eulab/kam.hpp"
#include "eulab/suspension.hpp"

namespace eulab::pipeline {

inline constexpr const char* kVersion = "1.0.0";

struct Context {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

/// The perturbed twist-map experiment on S³: Π0 on (a, b), the resonant
/// circle, the generating perturbation and Π = Π0 ∘ φ_ε.
struct ResonantSetup {
  CurlProfileS3 curl;
  ResonanceResult resonance;
  int p = 0;
  int q = 1;
  double center = 0.5;
  GeneratingPerturbation perturbation;
  AnnulusMap base;
  AnnulusMap target;
};

/// Requires an S³ config; the centre defaults to the first resonant circle
/// of W = 2πp/q. Numeric error when no such circle exists.
ResonantSetup resonant_setup(const ExperimentConfig& cfg);

/// Periodic orbits of the setup's map and their classification.
struct PeriodicAnalysis {
  PeriodicSearch search;
  std::vector<FixedPointClass> classes;
  std::vector<IslandCenter> centers;  ///< elliptic orbits with their frames
  std::optional<std::size_t> elliptic;  ///< index of the first nondegenerate elliptic orbit
};
PeriodicAnalysis analyze_periodic(const ResonantSetup& setup, const ExperimentConfig& cfg);

/// κ over the full S³ section ρ ∈ (0, 1) using the analytic twist map of
/// the curl field (ε = 0) or the perturbed map with weights from the
/// suspended field; island centres are passed to the orbit classifier.
KappaEstimate s3_kappa(const ExperimentConfig& cfg, const Context& ctx, bool perturbed,
                       const std::vector<IslandCenter>& centers = {});

/// Metadata stamped into every artifact.
io::Json provenance(const ExperimentConfig& cfg, const Context& ctx);

io::Json flow(const ExperimentConfig& cfg);
/// CSV: seed_id,iter,theta1_unreduced,rho,transit_time
void poincare(const ExperimentConfig& cfg, const Context& ctx, std::ostream& csv);
/// CSV: rho,rotation_number,confidence
void rotnum(const ExperimentConfig& cfg, const Context& ctx, std::ostream& csv);
io::Json resonance(const ExperimentConfig& cfg);
io::Json perturb(const ExperimentConfig& cfg, const Context& ctx);
io::Json suspend(const ExperimentConfig& cfg, const Context& ctx);
io::Json kappa(const ExperimentConfig& cfg, const Context& ctx);
io::Json nonmixing(const ExperimentConfig& cfg, const Context& ctx);

}  // namespace eulab::pipeline
