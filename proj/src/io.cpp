#include "eulab/io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace eulab::io {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::validation, what); }

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) invalid(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::vector<double> number_array(const Json& j, const std::string& where) {
  if (!j.is_array()) invalid(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) invalid(where + " must be an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ScalarFunction function_from(const Json& j, const char* key, const char* variable, const std::vector<double>* nodes,
                             bool periodic) {
  const std::string where = std::string("profile.") + key;
  const Json& v = require(j, key, "profile");
  if (nodes) {
    auto values = number_array(v, where);
    return ScalarFunction::spline(CubicSpline(
        *nodes, std::move(values), periodic ? CubicSpline::Boundary::periodic : CubicSpline::Boundary::natural));
  }
  if (v.is_number()) return ScalarFunction::constant(v.get<double>());
  if (!v.is_string()) invalid(where + " must be an expression string");
  try {
    return ScalarFunction::expression(v.get<std::string>(), variable);
  } catch (const Error& e) {
    invalid(where + ": " + e.what());
  }
}

Json function_json(const ScalarFunction& f) {
  if (const CubicSpline* s = f.as_spline()) return s->values();
  return f.expression_text();
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Profile parse_profile(const Json& j) {
  if (!j.is_object()) invalid("profile must be an object");
  const std::string domain = require(j, "domain", "profile").get<std::string>();
  const std::string kind = j.value("kind", std::string("closed-form"));
  if (kind != "closed-form" && kind != "spline") invalid("profile.kind must be \"closed-form\" or \"spline\"");
  std::vector<double> nodes;
  const bool spline = kind == "spline";
  if (spline) nodes = number_array(require(j, "nodes", "profile"), "profile.nodes");
  if (domain == "s3") {
    if (spline && (nodes.front() > 0.0 || nodes.back() < 1.0)) invalid("profile.nodes must cover [0, 1]");
    return ShearProfileS3{function_from(j, "f1", "rho", spline ? &nodes : nullptr, false),
                          function_from(j, "f2", "rho", spline ? &nodes : nullptr, false)};
  }
  if (domain == "t3") {
    if (spline && (std::abs(nodes.front()) > 1e-12 || std::abs(nodes.back() - 2.0 * std::numbers::pi) > 1e-9))
      invalid("profile.nodes must span [0, 2pi] for a periodic T3 spline");
    ShearProfileT3 p{function_from(j, "f", "z", spline ? &nodes : nullptr, true),
                     function_from(j, "g", "z", spline ? &nodes : nullptr, true)};
    validate_periodic(p);
    return p;
  }
  invalid("profile.domain must be \"s3\" or \"t3\"");
}

Space profile_space(const Profile& p) { return std::holds_alternative<ShearProfileS3>(p) ? Space::s3 : Space::t3; }

Json profile_json(const Profile& p) {
  Json j;
  const ScalarFunction *a, *b;
  const char *ka, *kb;
  if (const auto* s = std::get_if<ShearProfileS3>(&p)) {
    j["domain"] = "s3";
    a = &s->f1;
    b = &s->f2;
    ka = "f1";
    kb = "f2";
  } else {
    const auto& t = std::get<ShearProfileT3>(p);
    j["domain"] = "t3";
    a = &t.f;
    b = &t.g;
    ka = "f";
    kb = "g";
  }
  const CubicSpline* sa = a->as_spline();
  j["kind"] = sa ? "spline" : "closed-form";
  if (sa) j["nodes"] = sa->nodes();
  j[ka] = function_json(*a);
  j[kb] = function_json(*b);
  return j;
}

Json to_json(const KappaEstimate& k) {
  Json j;
  j["space"] = k.space == Space::s3 ? "s3" : "t3";
  j["total_volume"] = k.total_volume;
  j["sampled_volume"] = k.sampled_volume;
  Json classes = Json::array();
  for (const auto& c : k.classes)
    classes.push_back({{"tag", c.cls.tag()},
                       {"fraction", c.fraction},
                       {"absolute", c.absolute},
                       {"stderr", c.stderr_abs},
                       {"count", c.count}});
  j["classes"] = classes;
  j["unclassified"] = k.unclassified;
  j["lambda"] = k.lambda();
  j["lambda_stderr"] = k.lambda_stderr();
  Json counts;
  for (int v = 0; v < 5; ++v) counts[std::string(to_string(static_cast<OrbitVerdict>(v)))] = k.verdict_counts[v];
  j["verdicts"] = counts;
  j["grid"] = {{"n_angle", k.grid.n_angle},
               {"n_radial", k.grid.n_radial},
               {"jitter", k.grid.jitter},
               {"patches", k.patches},
               {"iterations", k.iterations}};
  j["seed"] = k.seed;
  j["warnings"] = k.warnings;
  return j;
}

Json to_json(const FixedPointClass& c) {
  Json j;
  j["theta"] = c.point.theta;
  j["rho"] = c.point.rho;
  j["p"] = c.p;
  j["q"] = c.q;
  j["lambda_re"] = c.lambda.real();
  j["lambda_im"] = c.lambda.imag();
  j["trace"] = c.trace;
  j["det"] = c.det;
  j["omega"] = c.omega;
  j["resonance_flags"] = Json::array({c.resonance[0], c.resonance[1], c.resonance[2], c.resonance[3]});
  j["alpha"] = c.alpha;
  j["alpha_sigma"] = c.alpha_sigma;
  j["verdict"] = to_string(c.verdict);
  if (c.twist) {
    j["twist_fit"] = {{"ok", c.twist->ok},
                      {"radii", c.twist->radii},
                      {"rotation", c.twist->rotation},
                      {"omega", c.twist->omega},
                      {"omega_sigma", c.twist->omega_sigma},
                      {"diagnosis", c.twist->diagnosis}};
  }
  return j;
}

Json to_json(const StabilityReport& r) {
  return {{"theta", r.point.theta}, {"rho", r.point.rho},     {"inner", r.inner},
          {"outer", r.outer},       {"fractions", r.fractions}, {"verdict", r.verdict},
          {"diagnosis", r.diagnosis}};
}

Json to_json(const NondegeneracyReport& r) {
  Json crit = Json::array();
  for (const auto& c : r.critical)
    crit.push_back({{"location", c.location}, {"value", c.value}, {"hessian", c.hessian}});
  Json omega = Json::array();
  for (const auto& iv : r.omega_tau) omega.push_back(Json::array({iv.lo, iv.hi}));
  return {{"morse_bott", to_string(r.morse_bott)},
          {"critical", crit},
          {"twist_min", r.twist_min},
          {"tau", r.tau},
          {"tau_request", r.tau_request},
          {"lipschitz", r.lipschitz},
          {"omega_tau", omega},
          {"twist_zeros", r.twist_zeros},
          {"nondegenerate", r.nondegenerate},
          {"diagnosis", r.diagnosis}};
}

Json to_json(const SuspensionReport& r) {
  return {{"sup", r.sup},
          {"rms", r.rms},
          {"cells", r.cells},
          {"flagged", r.flagged},
          {"field_deviation", r.field_deviation},
          {"map_deviation", r.map_deviation},
          {"ratio", r.ratio}};
}

Json to_json(const TransportReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"tag", row.cls.tag()},
                    {"before", row.before},
                    {"after", row.after},
                    {"combined_stderr", row.combined_stderr},
                    {"agree", row.agree}});
  return {{"agree", r.agree}, {"rows", rows}, {"diagnosis", r.diagnosis}};
}

Json to_json(const PeriodicOrbit& o) {
  Json pts = Json::array();
  for (const auto& x : o.points) pts.push_back(Json::array({x.theta, x.rho}));
  return {{"p", o.p},
          {"q", o.q},
          {"points", pts},
          {"winding", o.winding},
          {"residual", number_or_null(o.residual)},
          {"mean_rho", o.mean_rho},
          {"degenerate", o.degenerate}};
}

Json perturbation_json(const GeneratingPerturbation& pert, int p, int q) {
  Json h = Json::array();
  for (const auto& x : pert.harmonics) h.push_back({{"mode", x.mode}, {"amplitude", x.amplitude}, {"phase", x.phase}});
  return {{"eps", pert.eps},
          {"p", p},
          {"q", q},
          {"c", pert.center},
          {"bump_radius", pert.radius},
          {"chi_support", Json::array({0.5 * std::numbers::pi, 1.5 * std::numbers::pi})},
          {"harmonics", h}};
}

Json error_envelope(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
  out_ << std::setprecision(17);
}

void CsvWriter::separator() {
  if (column_ == columns_) throw Error(ErrorCode::io, "csv: too many columns in row");
  if (column_++) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::int64_t v) {
  separator();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::size_t v) {
  separator();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (column_ != columns_) throw Error(ErrorCode::io, "csv: incomplete row");
  out_ << '\n';
  column_ = 0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::io, "write failed for " + path);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace eulab::io
