#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli_app.hpp"
#include "geomed/cli_io.hpp"
#include "geomed/errors.hpp"

namespace geomed {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "geomed");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("geomed_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path golden_dir() {
  return GEOMED_GOLDEN_DIR;
}

// Compares against a stored file; GEOMED_UPDATE_GOLDEN=1 rewrites it.
void expect_golden(const std::string& name, const std::string& actual) {
  const auto path = golden_dir() / name;
  if (std::getenv("GEOMED_UPDATE_GOLDEN")) {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  ASSERT_TRUE(fs::exists(path)) << path;
  EXPECT_EQ(slurp(path), actual) << "golden mismatch: " << path;
}

// Every key path with its JSON type, descending into the first array element.
void schema_of(const json& j, const std::string& prefix, std::set<std::string>& out) {
  out.insert(prefix + ":" + j.type_name());
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) schema_of(v, prefix + "/" + k, out);
  } else if (j.is_array() && !j.empty()) {
    schema_of(j.front(), prefix + "[]", out);
  }
}

std::string schema_text(const json& j) {
  std::set<std::string> paths;
  schema_of(j, "", paths);
  std::string s;
  for (const auto& p : paths) s += p + "\n";
  return s;
}

// CSV ingestion.

TEST(CsvIngest, ParsesRows) {
  TempDir dir;
  const auto rows = ingest_csv(dir.file("a.csv", "1,2\n\n3.5, -4e-1\r\n"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], make_vector({1, 2}));
  EXPECT_EQ(rows[1], make_vector({3.5, -0.4}));
}

TEST(CsvIngest, Errors) {
  TempDir dir;
  EXPECT_THROW(ingest_csv(dir.file("empty.csv", "")), DataError);
  try {
    ingest_csv(dir.file("bad.csv", "1,2\n1,abc\n"));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:2: column 2"), std::string::npos) << e.what();
  }
  try {
    ingest_csv(dir.file("arity.csv", "1,2\n1,2\n1,2,3\n"));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("arity.csv:3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ingest_csv(dir.file("nan.csv", "1,nan\n")), DataError);
  EXPECT_THROW(ingest_csv(dir.file("inf.csv", "inf,1\n")), DataError);
  EXPECT_THROW(ingest_csv(dir / "missing.csv"), IoError);
  EXPECT_THROW(ingest_csv(dir.file("dim.csv", "1,2\n"), 3), DataError);
}

TEST(CsvIngest, ParseRowDirect) {
  std::vector<double> out;
  std::string error;
  EXPECT_TRUE(parse_csv_row("1, +2,3e2", out, error));
  EXPECT_EQ(out, (std::vector<double>{1, 2, 300}));
  EXPECT_FALSE(parse_csv_row("1,,2", out, error));
  EXPECT_NE(error.find("column 2"), std::string::npos);
}

// Estimate command.

TEST(Estimate, SymmetricCloud) {
  TempDir dir;
  std::string csv;
  const char* pts[] = {"1,0", "-1,0", "0,1", "0,-1"};
  for (int i = 0; i < 10000; ++i) csv += std::string(pts[(i * 7 + i / 4) % 4]) + "\n";
  const auto input = dir.file("cloud.csv", csv);
  const auto r = run_cli({"estimate", "--input", input.string(), "--delta", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["n"], 10000);
  EXPECT_LT(std::hypot(j["z_bar"][0].get<double>(), j["z_bar"][1].get<double>()), 0.1);
  EXPECT_NEAR(j["lambda_min"]["value"].get<double>(), 0.5, 0.01);
  ASSERT_TRUE(j["ball"].is_object());
  const double radius = j["ball"]["radius"];
  EXPECT_GT(radius, 0.0);
  EXPECT_TRUE(std::isfinite(radius));
  EXPECT_TRUE(j["ball"]["below_validity_rank"].get<bool>());
  EXPECT_TRUE(j["warnings"].empty());
}

TEST(Estimate, DimensionOneWarns) {
  const auto r = run_cli({"estimate", "--generate", "gaussian-isotropic:dim=1", "--count", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["warnings"].size(), 1u);
  EXPECT_EQ(j["warnings"][0], "uniqueness-not-guaranteed-dim1");
}

TEST(Estimate, RepeatedRunsAreByteIdentical) {
  const std::vector<std::string> args{"estimate", "--generate", "sphere-shell:dim=4", "--count", "3000",
                                      "--seed", "12", "--checkpoints", "10,100,1000"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto other = args;
  other[6] = "13";
  EXPECT_NE(a.out, run_cli(other).out);
}

TEST(Estimate, GoldenOutputs) {
  const auto input = (golden_dir() / "cloud.csv").string();
  const auto json_run = run_cli({"estimate", "--input", input, "--checkpoints", "4,12"});
  ASSERT_EQ(json_run.code, 0) << json_run.err;
  expect_golden("estimate_cloud.json", json_run.out);
  const auto csv_run = run_cli({"estimate", "--input", input, "--checkpoints", "4,12", "--format", "csv"});
  ASSERT_EQ(csv_run.code, 0) << csv_run.err;
  expect_golden("estimate_cloud.csv", csv_run.out);
}

TEST(Estimate, WeiszfeldPlugInCenter) {
  const auto input = (golden_dir() / "cloud.csv").string();
  const auto r = run_cli({"estimate", "--input", input, "--plugin-center", "weiszfeld"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["lambda_min"]["center"], "weiszfeld");
  const auto w = json::parse(run_cli({"weiszfeld", "--input", input}).out);
  EXPECT_TRUE(w["converged"].get<bool>());
}

// Exit statuses.

TEST(ExitCodes, ByErrorCategory) {
  TempDir dir;
  EXPECT_NE(run_cli({"frobnicate"}).code, 0);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"estimate", "--generate", "gaussian-isotropic", "--count", "10", "--alpha", "1.5"}).code,
            kExitConfig);
  EXPECT_EQ(run_cli({"estimate"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"estimate", "--input", dir.file("bad.csv", "1,x\n").string()}).code, kExitData);
  EXPECT_EQ(run_cli({"estimate", "--input", (dir / "missing.csv").string()}).code, kExitIo);
  // Dimension one has a singular Hessian, so the oracle lambda_min is not positive.
  EXPECT_EQ(run_cli({"coverage", "--generate", "gaussian-isotropic:dim=1", "--replications", "2",
                     "--checkpoints", "100", "--reference-size", "1000"})
                .code,
            kExitNumerical);
}

// Experiment reports.

TEST(Reports, RatesSchemaGolden) {
  const auto r = run_cli({"rates", "--generate", "gaussian-isotropic:dim=2", "--replications", "4", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  expect_golden("rates_schema.txt", schema_text(j));
  EXPECT_TRUE(j["rm_slope"].is_object());
  EXPECT_TRUE(j["avg_slope"].is_object());
  EXPECT_EQ(j["checkpoints"].size(), default_checkpoints().size());
}

TEST(Reports, CoverageSchemaGolden) {
  const auto r = run_cli({"coverage", "--generate", "gaussian-isotropic:dim=3", "--replications", "20",
                          "--checkpoints", "1000", "--reference-size", "20000", "--rm-scale-c", "2",
                          "--omit-timing"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  expect_golden("coverage_schema.txt", schema_text(j));
  EXPECT_EQ(j["config"]["delta"], 0.05);
  EXPECT_TRUE(j["checkpoints"][0]["coverage_avg"].is_number());
  EXPECT_TRUE(j["checkpoints"][0]["coverage_avg_stderr"].is_number());
  EXPECT_FALSE(j.contains("runtime"));
}

TEST(Reports, JsonRoundTrip) {
  ExperimentConfig cfg;
  cfg.distribution.dim = 3;
  cfg.replications = 5;
  cfg.checkpoints = {100, 1000};
  cfg.reference_sample_size = 10000;
  for (const auto& report :
       {rate_experiment(cfg), coverage_experiment(cfg, LambdaMinMode::PlugIn), calibrate_rm_constant(cfg)}) {
    const auto text = to_json(report).dump();
    EXPECT_EQ(experiment_report_from_json(json::parse(text)), report);
  }
}

TEST(Reports, CsvAndJsonAgreeTo15Digits) {
  const std::vector<std::string> base{"rates", "--generate", "gaussian-isotropic:dim=2", "--replications",
                                      "6", "--checkpoints", "100,300,1000,3000,10000", "--seed", "4"};
  auto csv_args = base;
  csv_args.insert(csv_args.end(), {"--format", "csv"});
  const auto j = json::parse(run_cli(base).out);
  std::istringstream csv(run_cli(csv_args).out);
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "quantity,n,value,stderr");
  std::size_t checked = 0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    const double value = std::stod(f[2]);
    double expected = 0.0;
    if (f[0] == "mse_rm" || f[0] == "mse_avg") {
      for (const auto& cp : j["checkpoints"])
        if (std::to_string(cp["n"].get<std::uint64_t>()) == f[1]) expected = cp[f[0]];
    } else if (f[0] == "rm_slope" || f[0] == "avg_slope") {
      expected = j[f[0]]["slope"];
    } else {
      continue;
    }
    EXPECT_NEAR(value, expected, 1e-15 * std::abs(expected)) << line;
    ++checked;
  }
  EXPECT_EQ(checked, 12u);
}

TEST(Reports, OutputFileWritesSidecarTable) {
  TempDir dir;
  const auto out = dir / "rates.json";
  const auto r = run_cli({"rates", "--generate", "gaussian-isotropic:dim=2", "--replications", "3",
                          "--checkpoints", "10,100", "--output", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_NO_THROW(json::parse(slurp(out)));
  EXPECT_EQ(slurp(fs::path(out.string() + ".table.csv")).rfind("quantity,n,value,stderr\n", 0), 0u);
}

TEST(Reports, DeterministicAcrossWorkers) {
  const std::vector<std::string> base{"rates", "--generate", "gaussian-isotropic:dim=3", "--replications",
                                      "8", "--checkpoints", "100,1000", "--omit-timing"};
  auto a = base, b = base;
  a.insert(a.end(), {"--workers", "1"});
  b.insert(b.end(), {"--workers", "4"});
  auto ja = json::parse(run_cli(a).out);
  auto jb = json::parse(run_cli(b).out);
  ja["config"].erase("parallel_workers");
  jb["config"].erase("parallel_workers");
  EXPECT_EQ(ja, jb);
}

TEST(Reports, TailsAndAgree) {
  const auto t = run_cli({"tails", "--replications", "500", "--seed", "2"});
  ASSERT_EQ(t.code, 0) << t.err;
  const auto j = json::parse(t.out);
  EXPECT_EQ(j["scenarios"].size(), 3u);
  const auto a = run_cli({"agree", "--generate", "gaussian-isotropic:dim=3", "--count", "20000"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(json::parse(a.out)["status"], "pass");
}

// Configuration precedence.

TEST(Config, FileEnvAndFlagPrecedence) {
  TempDir dir;
  const auto conf = dir.file("run.toml", "alpha = 0.7\ndelta = 0.1\nseed = 5\n");
  const std::vector<std::string> args{"rates", "--generate", "gaussian-isotropic:dim=2", "--replications", "3",
                                      "--checkpoints", "10,100", "--config", conf.string(), "--omit-timing"};
  auto j = json::parse(run_cli(args).out);
  EXPECT_EQ(j["config"]["alpha"], 0.7);
  EXPECT_EQ(j["config"]["delta"], 0.1);
  EXPECT_EQ(j["config"]["master_seed"], 5);

  auto flagged = args;
  flagged.insert(flagged.end(), {"--delta", "0.2", "--seed", "6"});
  j = json::parse(run_cli(flagged).out);
  EXPECT_EQ(j["config"]["delta"], 0.2);
  EXPECT_EQ(j["config"]["alpha"], 0.7);
  EXPECT_EQ(j["config"]["master_seed"], 6);

  ::setenv("GEOMED_SEED", "9", 1);
  const std::vector<std::string> plain{"rates", "--generate", "gaussian-isotropic:dim=2", "--replications", "3",
                                       "--checkpoints", "10,100", "--omit-timing"};
  j = json::parse(run_cli(plain).out);
  EXPECT_EQ(j["config"]["master_seed"], 9);
  j = json::parse(run_cli(args).out);
  EXPECT_EQ(j["config"]["master_seed"], 5);
  ::unsetenv("GEOMED_SEED");
}

TEST(Config, RunConfigValidation) {
  RunConfig cfg;
  EXPECT_THROW(cfg.validate(), ConfigError);  // estimate without a source
  cfg.generator = DistributionSpec{};
  cfg.count = 10;
  EXPECT_NO_THROW(cfg.validate());
  cfg.delta = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.delta = 0.05;
  cfg.input = "x.csv";
  EXPECT_THROW(cfg.validate(), ConfigError);  // both sources
}

}  // namespace
}  // namespace geomed
