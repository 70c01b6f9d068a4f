// Config parsing, report serialization and the command-line driver.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "eulab/config.hpp"
#include "eulab/errors.hpp"
#include "eulab/io.hpp"

using namespace eulab;
namespace fs = std::filesystem;

namespace {

const std::string kCli = EULAB_CLI;
const std::string kConfigs = EULAB_CONFIG_DIR;

io::Json example() { return io::Json::parse(io::read_file(kConfigs + "/example_s3_p2q5.json")); }

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI with EULAB_OUT pointing at a fresh directory.
CliRun run_cli(const std::string& args, const fs::path& out_dir) {
  fs::remove_all(out_dir);
  const fs::path so = out_dir.string() + ".stdout", se = out_dir.string() + ".stderr";
  const std::string cmd = "EULAB_OUT='" + out_dir.string() + "' '" + kCli + "' " + args + " > '" + so.string() +
                          "' 2> '" + se.string() + "'";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = io::read_file(so.string());
  r.err = io::read_file(se.string());
  return r;
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("eulab_cli_" + name); }

void expect_invalid(io::Json j, const std::string& fragment) {
  try {
    parse_config(j);
    ADD_FAILURE() << "accepted: " << j.dump();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Hash, FnvTestVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Config, ExampleParses) {
  const ExperimentConfig c = parse_config(example());
  EXPECT_EQ(c.space, Space::s3);
  ASSERT_TRUE(c.has_resonance());
  EXPECT_EQ(*c.p, -2);
  EXPECT_EQ(*c.q, 5);
  EXPECT_DOUBLE_EQ(c.eps, 1e-3);
  EXPECT_EQ(c.grid.n_angle, 200u);
  EXPECT_EQ(c.iterations, 10000u);
  EXPECT_DOUBLE_EQ(c.tol.twist, 7.9);
  EXPECT_EQ(c.hash.size(), 16u);
}

TEST(Config, HashIgnoresKeyOrderAndWhitespace) {
  const io::Json a = example();
  const io::Json b = io::Json::parse(a.dump());
  io::Json reordered = io::Json::object();
  std::vector<std::string> keys;
  for (auto it = a.begin(); it != a.end(); ++it) keys.push_back(it.key());
  for (auto k = keys.rbegin(); k != keys.rend(); ++k) reordered[*k] = a.at(*k);
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a), config_hash(reordered));
  io::Json changed = a;
  changed["seed"] = 1;
  EXPECT_NE(config_hash(a), config_hash(changed));
}

TEST(Config, ValidationErrors) {
  io::Json j = example();
  j["resonance"] = {{"p", 2}, {"q", 4}};
  expect_invalid(j, "coprime");
  j = example();
  j["resonance"] = {{"p", 1}, {"q", 0}};
  expect_invalid(j, "q");
  j = example();
  j["annulus"] = {0.9, 0.1};
  expect_invalid(j, "annulus");
  j = example();
  j["frobnicate"] = 1;
  expect_invalid(j, "unknown key");
  j = example();
  j["schema_version"] = 2;
  expect_invalid(j, "schema_version");
  j = example();
  j["space"] = "t3";
  expect_invalid(j, "");
  j = example();
  j["tolerances"]["integrator"] = -1.0;
  expect_invalid(j, "integrator");
  j = example();
  j["iterations"] = 10;
  expect_invalid(j, "iterations");
  j = example();
  j["profile"]["f1"] = "1 + ";
  expect_invalid(j, "");
  j = example();
  j["profile"] = {{"domain", "t3"}, {"f", "z"}, {"g", "0"}};
  j["space"] = "t3";
  expect_invalid(j, "");
  j = example();
  j["seed"] = -3;
  expect_invalid(j, "seed");
  j = example();
  j["transport"] = {{"kind", "t3-shear"}, {"a", "sin(z)"}};
  expect_invalid(j, "transport");
}

TEST(Config, SplineProfile) {
  io::Json j = example();
  j["profile"] = {{"domain", "s3"},
                  {"kind", "spline"},
                  {"nodes", {0.0, 0.25, 0.5, 0.75, 1.0}},
                  {"f1", {1.0, 1.25, 1.5, 1.75, 2.0}},
                  {"f2", {0.0, 0.0, 0.0, 0.0, 0.0}}};
  const ExperimentConfig c = parse_config(j);
  const auto& prof = std::get<ShearProfileS3>(c.profile);
  EXPECT_TRUE(prof.f1.is_spline());
  EXPECT_NEAR(prof.f1(0.6), 1.6, 1e-12);
  j["profile"]["nodes"] = {0.1, 0.25, 0.5, 0.75, 1.0};
  expect_invalid(j, "nodes");
}

TEST(Io, CsvWriterChecksColumns) {
  std::ostringstream os;
  io::CsvWriter w(os, {"a", "b"});
  w << 1.5 << std::int64_t{2};
  w.end_row();
  EXPECT_EQ(os.str(), "a,b\n1.5,2\n");
  w << 1.0;
  EXPECT_THROW(w.end_row(), Error);
}

TEST(Io, ErrorEnvelope) {
  const io::Json e = io::error_envelope("validation", "bad p");
  EXPECT_EQ(e.dump(), R"({"error":{"code":"validation","message":"bad p"}})");
}

TEST(Cli, BadConfigExitsWithValidationCode) {
  const CliRun r = run_cli("flow --config '" + kConfigs + "/bad.json'", scratch("bad"));
  EXPECT_EQ(r.code, 2);
  const io::Json e = io::Json::parse(r.err);
  EXPECT_EQ(e["error"]["code"], "validation");
  EXPECT_NE(e["error"]["message"].get<std::string>().find("coprime"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("flow", scratch("usage")).code, 2);
  EXPECT_EQ(run_cli("nosuchcommand", scratch("usage")).code, 2);
  EXPECT_EQ(run_cli("flow --config /nonexistent/x.json", scratch("usage")).code, 2);
  EXPECT_EQ(run_cli("flow --config '" + kConfigs + "/quick_s3.json' --format xml", scratch("usage")).code, 2);
  EXPECT_EQ(run_cli("verify --only 99", scratch("usage")).code, 2);
}

TEST(Cli, FlowReportCarriesProvenance) {
  const fs::path dir = scratch("flow");
  const CliRun r = run_cli("flow --config '" + kConfigs + "/example_s3_p2q5.json'", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const io::Json doc = io::Json::parse(io::read_file((dir / "flow.json").string()));
  EXPECT_EQ(doc["command"], "flow");
  EXPECT_EQ(doc["provenance"]["config_hash"], config_hash(example()));
  EXPECT_EQ(doc["provenance"]["version"], "1.0.0");
  EXPECT_TRUE(doc["nondegeneracy"]["nondegenerate"].get<bool>());
  EXPECT_GE(doc["nondegeneracy"]["tau"].get<double>(), 7.9);
}

TEST(Cli, TablesHaveHashCommentAndHeader) {
  const fs::path dir = scratch("tables");
  const std::string cfg = kConfigs + "/quick_s3.json";
  const std::string hash = load_config(cfg).hash;
  ASSERT_EQ(run_cli("poincare --config '" + cfg + "' --seed 3", dir).code, 0);
  std::ifstream in(dir / "poincare.csv");
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  EXPECT_EQ(first, "# config_hash=" + hash + " version=1.0.0 seed=3");
  EXPECT_EQ(header, "seed_id,iter,theta1_unreduced,rho,transit_time");

  ASSERT_EQ(run_cli("rotnum --config '" + cfg + "' --format json", dir).code, 0);
  const io::Json doc = io::Json::parse(io::read_file((dir / "rotnum.json").string()));
  EXPECT_EQ(doc["columns"], io::Json::parse(R"(["rho","rotation_number","confidence"])"));
  EXPECT_FALSE(doc["rows"].empty());
}

TEST(Cli, PipelineOnQuickConfig) {
  const fs::path dir = scratch("pipeline");
  const std::string cfg = kConfigs + "/quick_s3.json";
  const CliRun r = run_cli("nonmixing --config '" + cfg + "'", dir);
  ASSERT_EQ(r.code, 0) << r.err;
  const io::Json doc = io::Json::parse(io::read_file((dir / "nonmixing.json").string()));
  EXPECT_EQ(doc["elliptic_certificate"]["verdict"], "elliptic-nondegenerate");
  EXPECT_GT(doc["lambda"].get<double>(), 0.0);
  EXPECT_TRUE(doc["bound"]["holds"].get<bool>());
  EXPECT_LT(doc["suspension"]["sup"].get<double>(), 5e-6);

  // Same seed, same bytes.
  const std::string first = io::read_file((dir / "nonmixing.json").string());
  ASSERT_EQ(run_cli("nonmixing --config '" + cfg + "' --threads 2", dir).code, 0);
  EXPECT_EQ(io::read_file((dir / "nonmixing.json").string()), first);
}

TEST(Cli, KappaCsvAndIntegrableNeedsNoResonance) {
  const fs::path dir = scratch("kappa");
  const std::string cfg = kConfigs + "/quick_s3.json";
  ASSERT_EQ(run_cli("kappa --config '" + cfg + "' --format csv", dir).code, 0);
  std::ifstream in(dir / "kappa.csv");
  std::string first, header;
  std::getline(in, first);
  std::getline(in, header);
  EXPECT_EQ(first.rfind("# config_hash=", 0), 0u);
  EXPECT_EQ(header, "tag,fraction,absolute,stderr");

  const CliRun r = run_cli("perturb --config '" + kConfigs + "/integrable_s3.json'", dir);
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, VerifyChecksArtifactHashes) {
  const fs::path dir = scratch("verify");
  const std::string cfg = kConfigs + "/quick_s3.json";
  ASSERT_EQ(run_cli("flow --config '" + cfg + "'", dir).code, 0);
  // Keep the flow artifact, then verify against the same and a different config.
  const std::string cmd_same = "EULAB_OUT='" + dir.string() + "' '" + kCli + "' verify --only 1,5 --config '" + cfg +
                               "' > /dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd_same.c_str())), 0);
  const io::Json v = io::Json::parse(io::read_file((dir / "verify.json").string()));
  EXPECT_TRUE(v["passed"].get<bool>());
  EXPECT_EQ(v["criteria"].size(), 2u);
  const std::string cmd_other = "EULAB_OUT='" + dir.string() + "' '" + kCli + "' verify --only 1 --config '" +
                                kConfigs + "/example_s3_p2q5.json' > /dev/null";
  EXPECT_EQ(WEXITSTATUS(std::system(cmd_other.c_str())), 3);
}
