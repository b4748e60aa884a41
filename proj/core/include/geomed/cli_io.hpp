#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geomed/bounds.hpp"
#include "geomed/distribution.hpp"
#include "geomed/experiments.hpp"
#include "geomed/sgd_median.hpp"
#include "geomed/vector.hpp"

namespace geomed {

// Process exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,     // usage errors, invalid or infeasible parameters
  kExitData = 3,       // malformed observations
  kExitIo = 4,         // unreadable input, unwritable output
  kExitNumerical = 5,  // non-convergence, undefined quantities
};

// Maps the active exception to an exit status; call from a catch block.
int exit_code_for_current_exception() noexcept;

/// Streams observations from a dense CSV file, one row per observation.
/// Blank lines are skipped. The dimension is fixed by the first row unless
/// given explicitly.
class CsvReader {
 public:
  // Throws IoError when the file cannot be opened.
  explicit CsvReader(const std::filesystem::path& path, std::optional<int> dim = std::nullopt);

  // Next observation, or empty at end of file. Throws DataError naming the
  // 1-based line on a malformed, non-finite or wrong-arity row.
  std::optional<Vector> next();

  std::size_t rows_read() const { return rows_; }
  std::optional<int> dim() const { return dim_; }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::optional<int> dim_;
  std::size_t line_ = 0;
  std::size_t rows_ = 0;
  std::string buffer_;
  std::vector<double> fields_;
};

// Reads every row. Throws DataError("no observations") on an empty file.
std::vector<Vector> ingest_csv(const std::filesystem::path& path, std::optional<int> dim = std::nullopt);

// Parses one CSV row into `out`; returns false with `error` set on failure.
bool parse_csv_row(std::string_view line, std::vector<double>& out, std::string& error);

enum class Command { Estimate, Weiszfeld, Rates, Coverage, Tails, Agree, Calibrate };
enum class OutputFormat { Json, Csv };

std::string_view to_string(Command command);
Command command_from_string(std::string_view name);
std::string_view to_string(OutputFormat format);
OutputFormat output_format_from_string(std::string_view name);

enum class PlugInCenter { ZBar, Weiszfeld };

/// Fully resolved parameters of one CLI invocation.
struct RunConfig {
  Command command = Command::Estimate;
  std::optional<std::filesystem::path> input;
  std::optional<DistributionSpec> generator;
  std::optional<std::uint64_t> count;  // observations to draw from the generator
  double alpha = StepSchedule::kDefaultAlpha;
  double c_gamma = StepSchedule::kDefaultCGamma;
  double delta = 0.05;
  std::vector<std::uint64_t> checkpoints;  // empty: command default
  std::optional<std::size_t> replications;  // empty: command default
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::optional<std::filesystem::path> output;
  OutputFormat format = OutputFormat::Json;
  LambdaMinMode lambda_min_mode = LambdaMinMode::Oracle;
  PlugInCenter plugin_center = PlugInCenter::ZBar;
  double truncation_radius = kDefaultTruncationRadius;
  std::optional<double> rm_scale_c;
  std::size_t reference_size = 0;
  double tol = 0.05;           // agree: distance threshold
  double weiszfeld_tol = 1e-10;
  std::size_t max_iter = 100000;
  std::vector<double> t_grid;  // tails: empty selects per-scenario defaults
  bool omit_timing = false;

  // Throws ConfigError; runs before any compute.
  void validate() const;
  std::size_t effective_replications() const;
  ExperimentConfig experiment_config() const;
};

/// Outcome of the estimate command.
struct EstimateResult {
  std::uint64_t n = 0;
  int dim = 0;
  std::uint64_t skipped = 0;
  double c_gamma = 0.0;
  double alpha = 0.0;
  double delta = 0.0;
  std::vector<double> z;
  std::vector<double> z_bar;
  std::vector<Snapshot> snapshots;
  std::optional<double> lambda_min;
  std::string lambda_min_mode = "plug-in";
  std::string lambda_min_center;  // "z_bar" or "weiszfeld"
  std::size_t lambda_min_excluded = 0;
  std::optional<ConfidenceBall> ball;
  std::optional<std::string> ball_omitted_reason;
  bool uniqueness_warning = false;
};

struct WeiszfeldSummary {
  std::size_t count = 0;
  WeiszfeldResult result;
  double objective = 0.0;
};

EstimateResult cmd_estimate_result(const RunConfig& cfg);

// Serialized primary output, plus the long-format table for experiment
// commands.
struct CommandOutput {
  std::string primary;
  std::optional<std::string> table;
};

CommandOutput cmd_estimate(const RunConfig& cfg);
CommandOutput cmd_weiszfeld(const RunConfig& cfg);
CommandOutput cmd_experiment(const RunConfig& cfg);
CommandOutput run_command(const RunConfig& cfg);

// Writes `out` to cfg.output (and the table next to it as
// "<output>.table.csv" for JSON output), or the primary text to stdout.
void write_command_output(const RunConfig& cfg, const CommandOutput& out, std::ostream& console);

// Serialization. Doubles in CSV use 17 significant digits; JSON uses the
// shortest representation that round-trips.
std::string format_double(double v);

nlohmann::json to_json(const EstimateResult& r);
std::string to_csv(const EstimateResult& r);

nlohmann::json to_json(const ExperimentReport& r, bool include_runtime = true);
ExperimentReport experiment_report_from_json(const nlohmann::json& j);

struct LongRow {
  std::string quantity;
  std::optional<double> n;
  double value = 0.0;
  std::optional<double> stderr_value;
};

std::vector<LongRow> long_table(const ExperimentReport& r);
std::vector<LongRow> long_table(const std::vector<TailReport>& reports);
std::vector<LongRow> long_table(const AgreementResult& r, std::size_t count);
std::string to_csv(const std::vector<LongRow>& rows);

nlohmann::json to_json(const std::vector<TailReport>& reports);
nlohmann::json to_json(const AgreementResult& r, std::size_t count, double tol);
nlohmann::json to_json(const WeiszfeldSummary& s);

}  // namespace geomed
