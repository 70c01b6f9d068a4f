#pragma once

#include <functional>
#include <string>
#include <vector>

namespace eulab::selfcheck {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;  ///< runtime limit in seconds
};

struct Options {
  std::size_t threads = 1;
  std::vector<int> only;  ///< empty: all criteria
};

inline constexpr int kCriteria = 10;

CriterionResult run_criterion(int id, const Options& opt);

/// Runs the selected criteria in order, reporting each result as it
/// completes.
std::vector<CriterionResult> run(const Options& opt,
                                 const std::function<void(const CriterionResult&)>& on_result = {});

/// "criterion N [PASS|FAIL] title (x.xs / budget): detail"
std::string format(const CriterionResult& r);

/// The example experiment: profile (1 + ρ, 0), resonance (p, q) = (−2, 5),
/// ε = 1e-3, annulus (0.05, 0.95), grid 200×200, N = 10⁴.
std::string example_config_json();
/// The integrable example (ε = 0).
std::string integrable_config_json();

}  // namespace eulab::selfcheck
