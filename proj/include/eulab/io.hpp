#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "eulab/errors.hpp"
#include "eulab/kam.hpp"
#include "eulab/steady.hpp"
#include "eulab/suspension.hpp"
#include "eulab/twistmaps.hpp"

namespace eulab::io {

using Json = nlohmann::ordered_json;

/// Either shear profile, tagged by its domain.
using Profile = std::variant<ShearProfileS3, ShearProfileT3>;

/// Profile JSON: {"domain": "s3"|"t3", "kind": "closed-form"|"spline",
/// "f1"/"f2" (S³) or "f"/"g" (T³) as expression strings, or for splines
/// "nodes": [...] with value arrays under the same keys}. T³ splines are
/// periodic on [0, 2π]. Throws validation errors.
Profile parse_profile(const Json& j);
Json profile_json(const Profile& p);
Space profile_space(const Profile& p);

Json to_json(const KappaEstimate& k);
Json to_json(const FixedPointClass& c);
Json to_json(const StabilityReport& r);
Json to_json(const NondegeneracyReport& r);
Json to_json(const SuspensionReport& r);
Json to_json(const TransportReport& r);
Json to_json(const PeriodicOrbit& o);
/// Perturbation block {eps, p, q, c, bump_radius, chi_support, harmonics}.
Json perturbation_json(const GeneratingPerturbation& pert, int p, int q);

/// {"error": {"code": ..., "message": ...}}
Json error_envelope(std::string_view code, std::string_view message);

/// Fixed-notation CSV writer with full double precision.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  CsvWriter& operator<<(double v);
  CsvWriter& operator<<(std::int64_t v);
  CsvWriter& operator<<(std::size_t v);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t column_ = 0;
  void separator();
};

/// Reads a whole file; io error if it cannot be opened.
std::string read_file(const std::string& path);
/// Writes atomically enough for batch use (truncate + write); io error on failure.
void write_file(const std::string& path, const std::string& content);

/// Serializes with two-space indent and a trailing newline.
std::string dump(const Json& j);

}  // namespace eulab::io
