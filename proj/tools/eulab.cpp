// Batch driver for the steady-flow / twist-map / κ pipeline.
//
// Exit codes: 0 success, 2 invalid input (config, flags), 3 numeric or
// runtime failure. Errors are printed to stderr as
// {"error": {"code": ..., "message": ...}}.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "eulab/config.hpp"
#include "eulab/parallel.hpp"
#include "eulab/pipeline.hpp"
#include "eulab/selfcheck.hpp"

namespace fs = std::filesystem;
using eulab::Error;
using eulab::ErrorCode;
using eulab::io::Json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string config;
  std::string out = "./out";
  std::optional<std::uint64_t> seed;
  std::size_t threads = eulab::default_threads();
  std::string format;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "experiment config (JSON)");
  if (config_required) opt->required();
  sub->add_option("--out", c.out, "output directory (EULAB_OUT overrides)");
  sub->add_option("--seed", c.seed, "RNG seed (default: config seed, else 0)");
  sub->add_option("--threads", c.threads, "worker threads (default: hardware)")->check(CLI::PositiveNumber);
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

fs::path out_dir(const Common& c) {
  const char* env = std::getenv("EULAB_OUT");
  fs::path dir = env && *env ? fs::path(env) : fs::path(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

eulab::ExperimentConfig load(const Common& c) {
  try {
    return eulab::load_config(c.config);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::io) throw Error(ErrorCode::validation, e.what());
    throw;
  }
}

eulab::pipeline::Context context(const Common& c, const eulab::ExperimentConfig& cfg) {
  return {c.seed.value_or(cfg.seed), c.threads};
}

/// Writes a JSON report with provenance, echoes it to stdout.
void emit_report(const Common& c, const std::string& name, const eulab::ExperimentConfig& cfg,
                 const eulab::pipeline::Context& ctx, Json body) {
  if (c.format == "csv") throw Error(ErrorCode::validation, name + " emits a JSON report; use --format json");
  Json doc;
  doc["command"] = name;
  doc["provenance"] = eulab::pipeline::provenance(cfg, ctx);
  for (auto& [k, v] : body.items()) doc[k] = v;
  const std::string text = eulab::io::dump(doc);
  eulab::io::write_file((out_dir(c) / (name + ".json")).string(), text);
  std::cout << text;
}

/// Tables: CSV preceded by one "# key=value ..." provenance comment line,
/// or JSON {provenance, columns, rows} with --format json.
void emit_table(const Common& c, const std::string& name, const eulab::ExperimentConfig& cfg,
                const eulab::pipeline::Context& ctx, const std::string& csv) {
  const fs::path dir = out_dir(c);
  const Json prov = eulab::pipeline::provenance(cfg, ctx);
  if (c.format == "json") {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    Json cols = Json::array();
    std::stringstream hs(line);
    for (std::string col; std::getline(hs, col, ',');) cols.push_back(col);
    Json rows = Json::array();
    while (std::getline(in, line)) {
      Json row = Json::array();
      std::stringstream ls(line);
      for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
      rows.push_back(row);
    }
    Json doc{{"command", name}, {"provenance", prov}, {"columns", cols}, {"rows", rows}};
    eulab::io::write_file((dir / (name + ".json")).string(), eulab::io::dump(doc));
    std::cout << (dir / (name + ".json")).string() << "\n";
    return;
  }
  std::ostringstream os;
  os << "# config_hash=" << prov["config_hash"].get<std::string>() << " version=" << eulab::pipeline::kVersion
     << " seed=" << ctx.seed << "\n"
     << csv;
  eulab::io::write_file((dir / (name + ".csv")).string(), os.str());
  std::cout << (dir / (name + ".csv")).string() << "\n";
}

/// Checks that every artifact in the output directory carries the hash of
/// the given config.
Json check_artifacts(const fs::path& dir, const std::string& hash, bool& ok) {
  Json rows = Json::array();
  if (!fs::exists(dir)) return rows;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& p : files) {
    std::string found;
    if (p.extension() == ".json") {
      try {
        const Json j = Json::parse(eulab::io::read_file(p.string()));
        if (j.contains("provenance")) found = j["provenance"].value("config_hash", "");
      } catch (const std::exception&) {
      }
    } else if (p.extension() == ".csv") {
      std::ifstream in(p);
      std::string line;
      std::getline(in, line);
      const auto pos = line.find("config_hash=");
      if (pos != std::string::npos) found = line.substr(pos + 12, 16);
    }
    if (found.empty()) continue;
    const bool match = found == hash;
    ok = ok && match;
    rows.push_back({{"artifact", p.filename().string()}, {"config_hash", found}, {"match", match}});
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eulab: steady Euler flows, twist maps and integrability spectra"};
  app.require_subcommand(1);
  Common c;
  std::string only;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"flow", "validate a profile and report curl, Bernoulli function and nondegeneracy"},
      {"poincare", "dump section orbits (CSV: seed_id,iter,theta1_unreduced,rho,transit_time)"},
      {"rotnum", "rotation-number profile over rho (CSV: rho,rotation_number,confidence)"},
      {"resonance", "locate resonant circles W(c) = 2 pi p/q"},
      {"perturb", "build the perturbed map, find and classify periodic orbits"},
      {"suspend", "build the suspended field and verify its return map"},
      {"kappa", "estimate the integrability spectrum per isotopy class"},
      {"nonmixing", "full pipeline report"},
      {"verify", "run the acceptance suite and check artifact hashes"},
  };
  std::map<std::string, CLI::App*> handles;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, c, std::string(s.name) != "verify");
    handles[s.name] = sub;
  }
  handles["verify"]->add_option("--only", only, "comma-separated criterion numbers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << eulab::io::error_envelope("validation", e.what()).dump() << "\n";
    return kExitValidation;
  }

  try {
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "verify") {
      eulab::selfcheck::Options opt;
      opt.threads = c.threads;
      std::stringstream ss(only);
      for (std::string tok; std::getline(ss, tok, ',');) {
        if (tok.empty()) continue;
        try {
          opt.only.push_back(std::stoi(tok));
        } catch (const std::exception&) {
          throw Error(ErrorCode::validation, "--only expects comma-separated integers");
        }
        if (opt.only.back() < 1 || opt.only.back() > eulab::selfcheck::kCriteria)
          throw Error(ErrorCode::validation, "--only: no criterion " + tok);
      }
      bool ok = true;
      Json results = Json::array();
      for (const auto& r : eulab::selfcheck::run(opt, [](const auto& r) {
             std::cout << eulab::selfcheck::format(r) << std::endl;
           })) {
        ok = ok && r.passed;
        results.push_back({{"criterion", r.id}, {"title", r.title}, {"passed", r.passed}, {"detail", r.detail}});
      }
      Json doc{{"command", "verify"}, {"criteria", results}};
      const fs::path dir = out_dir(c);
      if (!c.config.empty()) {
        const eulab::ExperimentConfig cfg = load(c);
        bool match = true;
        doc["config_hash"] = cfg.hash;
        doc["artifacts"] = check_artifacts(dir, cfg.hash, match);
        if (!match) std::cout << "artifact hash mismatch against " << c.config << "\n";
        ok = ok && match;
      }
      doc["passed"] = ok;
      eulab::io::write_file((dir / "verify.json").string(), eulab::io::dump(doc));
      return ok ? 0 : kExitNumeric;
    }

    const eulab::ExperimentConfig cfg = load(c);
    const auto ctx = context(c, cfg);
    if (cmd == "flow") {
      emit_report(c, cmd, cfg, ctx, eulab::pipeline::flow(cfg));
    } else if (cmd == "poincare" || cmd == "rotnum") {
      std::ostringstream csv;
      if (cmd == "poincare")
        eulab::pipeline::poincare(cfg, ctx, csv);
      else
        eulab::pipeline::rotnum(cfg, ctx, csv);
      emit_table(c, cmd, cfg, ctx, csv.str());
    } else if (cmd == "resonance") {
      emit_report(c, cmd, cfg, ctx, eulab::pipeline::resonance(cfg));
    } else if (cmd == "perturb") {
      emit_report(c, cmd, cfg, ctx, eulab::pipeline::perturb(cfg, ctx));
    } else if (cmd == "suspend") {
      emit_report(c, cmd, cfg, ctx, eulab::pipeline::suspend(cfg, ctx));
    } else if (cmd == "kappa") {
      Json body = eulab::pipeline::kappa(cfg, ctx);
      if (c.format == "csv") {
        std::ostringstream rows;
        rows << "tag,fraction,absolute,stderr\n" << std::setprecision(17);
        for (const auto& k : body["estimate"]["classes"])
          rows << k["tag"].get<std::string>() << "," << k["fraction"].get<double>() << ","
               << k["absolute"].get<double>() << "," << k["stderr"].get<double>() << "\n";
        std::ostringstream os;
        os << "# config_hash=" << cfg.hash << " version=" << eulab::pipeline::kVersion << " seed=" << ctx.seed
           << "\n"
           << rows.str();
        const fs::path path = out_dir(c) / "kappa.csv";
        eulab::io::write_file(path.string(), os.str());
        std::cout << path.string() << "\n";
      } else {
        emit_report(c, cmd, cfg, ctx, body);
      }
    } else if (cmd == "nonmixing") {
      emit_report(c, cmd, cfg, ctx, eulab::pipeline::nonmixing(cfg, ctx));
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << eulab::io::error_envelope(eulab::to_string(e.code()), e.what()).dump() << "\n";
    return e.code() == ErrorCode::validation ? kExitValidation : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << eulab::io::error_envelope("internal", e.what()).dump() << "\n";
    return kExitNumeric;
  }
}
