#include "eulab/config.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace eulab {

namespace {

using io::Json;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::validation, "config: " + what); }

double positive(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) invalid(where + key + " must be a number");
  const double x = v.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) invalid(where + key + " must be positive");
  return x;
}

std::size_t count(const Json& j, const char* key, std::size_t fallback, std::size_t minimum) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(minimum))
    invalid(std::string(key) + " must be an integer >= " + std::to_string(minimum));
  return v.get<std::size_t>();
}

const std::set<std::string> kTopKeys{"schema_version", "space", "profile",     "annulus",   "resonance",
                                     "perturbation",   "seeds", "iterations",  "grid",      "tolerances",
                                     "suspension",     "transport", "seed"};

DiffeoSpec parse_diffeo(const Json& j, Space space) {
  DiffeoSpec d;
  const std::string kind = j.value("kind", std::string("identity"));
  if (kind == "identity") return d;
  if (kind == "s3-rotation") {
    if (space != Space::s3) invalid("transport.kind s3-rotation needs space s3");
    d.kind = DiffeoSpec::Kind::s3_rotation;
    const std::string gen = j.value("generator", std::string("u1"));
    if (gen != "u1" && gen != "u2") invalid("transport.generator must be u1 or u2");
    d.generator = gen == "u1" ? VolumePreservingDiffeo::HopfGenerator::u1 : VolumePreservingDiffeo::HopfGenerator::u2;
    d.t = j.value("t", 0.0);
    return d;
  }
  if (kind == "t3-shear") {
    if (space != Space::t3) invalid("transport.kind t3-shear needs space t3");
    d.kind = DiffeoSpec::Kind::t3_shear;
    d.shear_a = j.value("a", std::string("0"));
    d.shear_b = j.value("b", std::string("0"));
    d.build(space);  // parse errors surface now
    return d;
  }
  invalid("transport.kind must be identity, s3-rotation or t3-shear");
}

}  // namespace

VolumePreservingDiffeo DiffeoSpec::build(Space space) const {
  switch (kind) {
    case Kind::identity: return VolumePreservingDiffeo::identity(space);
    case Kind::s3_rotation: return VolumePreservingDiffeo::s3_rotation(generator, t);
    case Kind::t3_shear:
      try {
        return VolumePreservingDiffeo::t3_shear(ScalarFunction::expression(shear_a, "z"),
                                                ScalarFunction::expression(shear_b, "z"));
      } catch (const Error& e) {
        throw Error(ErrorCode::validation, std::string("config: transport shear: ") + e.what());
      }
  }
  return VolumePreservingDiffeo::identity(space);
}

ReturnOptions ExperimentConfig::return_options() const {
  ReturnOptions r;
  r.integrator.tol = tol.integrator;
  r.event_tol = tol.event;
  return r;
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) invalid("top level must be an object");
  for (const auto& [key, _] : j.items())
    if (!kTopKeys.count(key)) invalid("unknown key \"" + key + "\"");
  ExperimentConfig c;
  if (j.contains("schema_version") && j.at("schema_version") != kConfigSchemaVersion)
    invalid("unsupported schema_version (expected " + std::to_string(kConfigSchemaVersion) + ")");

  if (!j.contains("space") || !j.at("space").is_string()) invalid("missing \"space\"");
  const std::string space = j.at("space").get<std::string>();
  if (space != "s3" && space != "t3") invalid("space must be s3 or t3");
  c.space = space == "s3" ? Space::s3 : Space::t3;
  if (!j.contains("profile")) invalid("missing \"profile\"");
  c.profile = io::parse_profile(j.at("profile"));
  if (io::profile_space(c.profile) != c.space) invalid("profile.domain does not match space");

  if (j.contains("annulus")) {
    const Json& an = j.at("annulus");
    if (!an.is_array() || an.size() != 2 || !an[0].is_number() || !an[1].is_number())
      invalid("annulus must be [a, b]");
    c.a = an[0].get<double>();
    c.b = an[1].get<double>();
    if (!(0.0 < c.a && c.a < c.b && c.b < 1.0)) invalid("annulus must satisfy 0 < a < b < 1");
  }

  if (j.contains("resonance")) {
    const Json& r = j.at("resonance");
    if (!r.is_object() || !r.contains("p") || !r.contains("q") || !r.at("p").is_number_integer() ||
        !r.at("q").is_number_integer())
      invalid("resonance must be {\"p\": int, \"q\": int}");
    const int p = r.at("p").get<int>(), q = r.at("q").get<int>();
    if (q < 1) invalid("resonance.q must be >= 1");
    if (std::gcd(std::abs(p), q) != 1)
      invalid("resonance (p, q) = (" + std::to_string(p) + ", " + std::to_string(q) + ") is not coprime");
    c.p = p;
    c.q = q;
  }

  if (j.contains("perturbation")) {
    const Json& pj = j.at("perturbation");
    if (!pj.is_object()) invalid("perturbation must be an object");
    c.eps = pj.value("eps", 0.0);
    if (!(c.eps >= 0.0) || !std::isfinite(c.eps)) invalid("perturbation.eps must be >= 0");
    c.bump_radius = positive(pj, "bump_radius", c.bump_radius, "perturbation.");
    if (pj.contains("c")) c.center = pj.at("c").get<double>();
    if (pj.contains("harmonics")) {
      for (const auto& h : pj.at("harmonics")) {
        Harmonic x;
        x.mode = h.value("mode", 1);
        x.amplitude = h.value("amplitude", 1.0);
        x.phase = h.value("phase", 0.0);
        if (x.mode < 0) invalid("perturbation.harmonics.mode must be >= 0");
        c.harmonics.push_back(x);
      }
    }
    if (pj.contains("sweep")) {
      c.eps_sweep.clear();
      for (const auto& e : pj.at("sweep")) {
        if (!e.is_number() || !(e.get<double>() > 0.0)) invalid("perturbation.sweep entries must be positive");
        c.eps_sweep.push_back(e.get<double>());
      }
    }
    if (c.eps > 0.0 && !c.has_resonance() && !c.center) invalid("perturbation needs a resonance or a centre c");
  }

  c.seeds = count(j, "seeds", c.seeds, 1);
  c.iterations = count(j, "iterations", c.iterations, 1000);
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    c.grid.n_angle = count(g, "n_angle", c.grid.n_angle, 1);
    c.grid.n_radial = count(g, "n_radial", c.grid.n_radial, 1);
    c.grid.jitter = g.value("jitter", true);
  }
  if (j.contains("tolerances")) {
    const Json& t = j.at("tolerances");
    for (const auto& [key, _] : t.items())
      if (key != "integrator" && key != "event" && key != "rotation" && key != "fit" && key != "newton" &&
          key != "twist")
        invalid("unknown tolerance \"" + key + "\"");
    c.tol.integrator = positive(t, "integrator", c.tol.integrator, "tolerances.");
    c.tol.event = positive(t, "event", c.tol.event, "tolerances.");
    c.tol.rotation = positive(t, "rotation", c.tol.rotation, "tolerances.");
    c.tol.fit = positive(t, "fit", c.tol.fit, "tolerances.");
    c.tol.newton = positive(t, "newton", c.tol.newton, "tolerances.");
    c.tol.twist = t.value("twist", 0.0);
    if (!(c.tol.twist >= 0.0)) invalid("tolerances.twist must be >= 0");
  }
  if (j.contains("suspension")) c.suspension_grid = count(j.at("suspension"), "grid", c.suspension_grid, 2);
  if (j.contains("transport")) c.transport = parse_diffeo(j.at("transport"), c.space);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) invalid("seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.hash = config_hash(j);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = io::read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    invalid(path + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string config_hash(const io::Json& j) {
  // nlohmann::json (not ordered_json) keeps object keys sorted.
  const nlohmann::json canonical = nlohmann::json::parse(j.dump());
  return hex64(fnv1a(canonical.dump()));
}

}  // namespace eulab
