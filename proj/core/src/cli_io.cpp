#include "geomed/cli_io.hpp"

#include <cmath>
#include <exception>
#include <ostream>
#include <memory>

#include "geomed/errors.hpp"
#include "geomed/geometry_oracle.hpp"

namespace geomed {

namespace {

struct CommandName {
  Command command;
  std::string_view name;
};

constexpr CommandName kCommands[] = {
    {Command::Estimate, "estimate"}, {Command::Weiszfeld, "weiszfeld"}, {Command::Rates, "rates"},
    {Command::Coverage, "coverage"}, {Command::Tails, "tails"},         {Command::Agree, "agree"},
    {Command::Calibrate, "calibrate"},
};

// Lambda_min values this close to zero relative to mean(1/r) are rounding
// noise around an exactly singular Hessian (collinear data, dim 1).
constexpr double kLambdaMinRelativeFloor = 1e-12;

bool needs_data(Command c) {
  return c == Command::Estimate || c == Command::Weiszfeld || c == Command::Agree;
}

bool is_monte_carlo(Command c) {
  return c == Command::Rates || c == Command::Coverage || c == Command::Calibrate;
}

/// One pass over the configured data source.
class ObservationSource {
 public:
  explicit ObservationSource(const RunConfig& cfg) {
    if (cfg.input) {
      reader_ = std::make_unique<CsvReader>(*cfg.input);
    } else {
      DistributionSpec spec = *cfg.generator;
      spec.seed = cfg.seed;
      sampler_ = std::make_unique<Sampler>(spec);
      remaining_ = *cfg.count;
    }
  }

  std::optional<Vector> next() {
    if (reader_) return reader_->next();
    if (remaining_ == 0) return std::nullopt;
    --remaining_;
    return sampler_->next();
  }

 private:
  std::unique_ptr<CsvReader> reader_;
  std::unique_ptr<Sampler> sampler_;
  std::uint64_t remaining_ = 0;
};

std::vector<Vector> load_all(const RunConfig& cfg) {
  ObservationSource src(cfg);
  std::vector<Vector> rows;
  while (auto v = src.next()) rows.push_back(std::move(*v));
  if (rows.empty()) throw DataError("no observations");
  return rows;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

int exit_code_for_current_exception() noexcept {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfig;
  } catch (const DataError&) {
    return kExitData;
  } catch (const IoError&) {
    return kExitIo;
  } catch (const NumericalError&) {
    return kExitNumerical;
  } catch (...) {
    return 1;
  }
}

std::string_view to_string(Command command) {
  for (const auto& c : kCommands) {
    if (c.command == command) return c.name;
  }
  return "unknown";
}

Command command_from_string(std::string_view name) {
  for (const auto& c : kCommands) {
    if (c.name == name) return c.command;
  }
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat format) { return format == OutputFormat::Json ? "json" : "csv"; }

OutputFormat output_format_from_string(std::string_view name) {
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  throw ConfigError("unknown output format '" + std::string(name) + "'");
}

void RunConfig::validate() const {
  if (needs_data(command)) {
    if (input.has_value() == generator.has_value()) {
      throw ConfigError(std::string(to_string(command)) +
                        ": exactly one of --input and --generate is required");
    }
    if (generator && (!count || *count < 1)) {
      throw ConfigError(std::string(to_string(command)) + ": --generate needs --count >= 1");
    }
  } else if (input) {
    throw ConfigError(std::string(to_string(command)) + ": --input is not supported, use --generate");
  }
  if (is_monte_carlo(command) && !generator) {
    throw ConfigError(std::string(to_string(command)) + ": --generate is required");
  }
  if (generator) generator->validate();
  StepSchedule(c_gamma, alpha);  // validates
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("--delta must lie in (0, 1)");
  if (workers < 1) throw ConfigError("--workers must be >= 1");
  if (replications && *replications < (command == Command::Tails ? 1u : 2u)) {
    throw ConfigError("--replications is too small");
  }
  if (!(truncation_radius > 0.0)) throw ConfigError("--truncation-radius must be > 0");
  if (!(tol > 0.0) || !(weiszfeld_tol > 0.0)) throw ConfigError("tolerances must be > 0");
  if (rm_scale_c && !(*rm_scale_c > 0.0)) throw ConfigError("--rm-scale-c must be > 0");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ConfigError("--t-grid values must be > 0");
  }
  if (!checkpoints.empty()) validate_checkpoints(checkpoints, checkpoints.back());
  if (is_monte_carlo(command)) experiment_config().validate();
}

std::size_t RunConfig::effective_replications() const {
  if (replications) return *replications;
  switch (command) {
    case Command::Coverage: return 500;
    case Command::Tails: return 10000;
    default: return 200;
  }
}

ExperimentConfig RunConfig::experiment_config() const {
  ExperimentConfig ec;
  if (generator) ec.distribution = *generator;
  ec.schedule = StepSchedule(c_gamma, alpha);
  ec.replications = effective_replications();
  if (!checkpoints.empty()) {
    ec.checkpoints = checkpoints;
  } else if (command == Command::Coverage) {
    ec.checkpoints = {10000};
  }
  ec.delta = delta;
  ec.parallel_workers = workers;
  ec.master_seed = seed;
  ec.truncation_radius = truncation_radius;
  ec.reference_sample_size = reference_size;
  ec.rm_scale_c = rm_scale_c;
  return ec;
}

EstimateResult cmd_estimate_result(const RunConfig& cfg) {
  const StepSchedule sched(cfg.c_gamma, cfg.alpha);
  EstimateResult res;
  res.c_gamma = sched.c_gamma();
  res.alpha = sched.alpha();
  res.delta = cfg.delta;

  OnlineMedian est(sched, cfg.truncation_radius);
  {
    ObservationSource src(cfg);
    auto next_cp = cfg.checkpoints.begin();
    while (auto x = src.next()) {
      est.observe(*x);
      if (next_cp != cfg.checkpoints.end() && est.state().n == *next_cp) {
        res.snapshots.push_back({est.state().n, est.state().z, est.state().z_bar});
        ++next_cp;
      }
    }
    if (est.empty()) throw DataError("no observations");
    if (next_cp != cfg.checkpoints.end()) {
      throw ConfigError("checkpoint " + std::to_string(*next_cp) + " exceeds the stream length " +
                        std::to_string(est.state().n));
    }
  }
  const auto& st = est.state();
  res.n = st.n;
  res.dim = static_cast<int>(st.z.size());
  res.skipped = st.skipped;
  res.z = to_std(st.z);
  res.z_bar = to_std(st.z_bar);
  res.uniqueness_warning = res.dim == 1;

  // Plug-in lambda_min: a second pass at Zbar_n, or at the Weiszfeld median
  // of the data held in memory.
  Vector center = st.z_bar;
  std::optional<SampleSet> sample;
  if (cfg.plugin_center == PlugInCenter::Weiszfeld) {
    sample.emplace(load_all(cfg));
    const auto wz = weiszfeld(*sample, cfg.weiszfeld_tol, cfg.max_iter);
    center = wz.median;
    res.lambda_min_center = "weiszfeld";
  } else {
    res.lambda_min_center = "z_bar";
  }
  CurvatureMoments moments(center, SingularPolicy::Exclude);
  if (sample) {
    for (const auto& x : sample->points()) moments.add(x);
  } else {
    ObservationSource src(cfg);
    while (auto x = src.next()) moments.add(*x);
  }
  res.lambda_min_excluded = moments.excluded();
  if (moments.used() == 0) {
    res.ball_omitted_reason = "every observation coincides with the center; lambda_min undefined";
    return res;
  }
  double lm = moments.lambda_min();
  if (lm <= kLambdaMinRelativeFloor * moments.mean_inverse_distance()) lm = std::min(lm, 0.0);
  res.lambda_min = lm;
  if (!(lm > 0.0)) {
    res.ball_omitted_reason = "lambda_min <= 0: the Hessian is singular and the averaged ball is undefined";
    return res;
  }
  res.ball = make_averaged_ball(st.z_bar, st.n, cfg.delta, lm, sched.alpha());
  return res;
}

CommandOutput cmd_estimate(const RunConfig& cfg) {
  cfg.validate();
  const auto res = cmd_estimate_result(cfg);
  if (cfg.format == OutputFormat::Csv) return {to_csv(res), std::nullopt};
  return {dump(to_json(res)), std::nullopt};
}

CommandOutput cmd_weiszfeld(const RunConfig& cfg) {
  cfg.validate();
  SampleSet sample(load_all(cfg));
  WeiszfeldSummary s;
  s.count = sample.count();
  s.result = weiszfeld(sample, cfg.weiszfeld_tol, cfg.max_iter);
  s.objective = objective(sample, s.result.median);
  if (cfg.format == OutputFormat::Csv) {
    std::vector<LongRow> rows;
    for (Eigen::Index i = 0; i < s.result.median.size(); ++i) {
      rows.push_back({"median[" + std::to_string(i) + "]", static_cast<double>(s.count), s.result.median[i],
                      std::nullopt});
    }
    rows.push_back({"iterations", static_cast<double>(s.count), static_cast<double>(s.result.iterations), std::nullopt});
    rows.push_back({"converged", static_cast<double>(s.count), s.result.converged ? 1.0 : 0.0, std::nullopt});
    rows.push_back({"gradient_norm", static_cast<double>(s.count), s.result.gradient_norm, std::nullopt});
    rows.push_back({"objective", static_cast<double>(s.count), s.objective, std::nullopt});
    return {to_csv(rows), std::nullopt};
  }
  return {dump(to_json(s)), std::nullopt};
}

CommandOutput cmd_experiment(const RunConfig& cfg) {
  cfg.validate();
  switch (cfg.command) {
    case Command::Rates:
    case Command::Coverage:
    case Command::Calibrate: {
      const auto ec = cfg.experiment_config();
      ExperimentReport report;
      if (cfg.command == Command::Rates) {
        report = rate_experiment(ec);
      } else if (cfg.command == Command::Coverage) {
        report = coverage_experiment(ec, cfg.lambda_min_mode);
      } else {
        report = calibrate_rm_constant(ec);
      }
      const auto table = to_csv(long_table(report));
      if (cfg.format == OutputFormat::Csv) return {table, std::nullopt};
      return {dump(to_json(report, !cfg.omit_timing)), table};
    }
    case Command::Tails: {
      std::vector<TailReport> reports;
      const auto scenarios = default_tail_scenarios();
      for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const auto grid = cfg.t_grid.empty() ? default_t_grid(scenarios[i]) : cfg.t_grid;
        reports.push_back(martingale_tail_experiment(scenarios[i], grid, cfg.effective_replications(),
                                                     substream_seed(cfg.seed, i), cfg.workers));
      }
      const auto table = to_csv(long_table(reports));
      if (cfg.format == OutputFormat::Csv) return {table, std::nullopt};
      return {dump(to_json(reports)), table};
    }
    case Command::Agree: {
      SampleSet sample(load_all(cfg));
      const auto res = estimator_agreement(sample, StepSchedule(cfg.c_gamma, cfg.alpha), cfg.tol, cfg.seed,
                                           cfg.truncation_radius);
      const auto table = to_csv(long_table(res, sample.count()));
      if (cfg.format == OutputFormat::Csv) return {table, std::nullopt};
      return {dump(to_json(res, sample.count(), cfg.tol)), table};
    }
    default:
      throw ConfigError("cmd_experiment: '" + std::string(to_string(cfg.command)) +
                        "' is not an experiment command");
  }
}

CommandOutput run_command(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::Estimate: return cmd_estimate(cfg);
    case Command::Weiszfeld: return cmd_weiszfeld(cfg);
    default: return cmd_experiment(cfg);
  }
}

void write_command_output(const RunConfig& cfg, const CommandOutput& out, std::ostream& console) {
  if (!cfg.output) {
    console << out.primary;
    return;
  }
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw IoError("write failed on '" + path.string() + "'");
  };
  write(*cfg.output, out.primary);
  if (out.table) {
    auto table_path = *cfg.output;
    table_path += ".table.csv";
    write(table_path, *out.table);
  }
}

}  // namespace geomed
