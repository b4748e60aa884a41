#include "cli_app.hpp"

#include <CLI11.hpp>

#include <ostream>
#include <string>

#include "geomed/cli_io.hpp"
#include "geomed/errors.hpp"

namespace geomed::cli {

namespace {

constexpr const char* kDescription =
    "Online geometric median with averaged stochastic gradient, confidence balls, "
    "and Monte Carlo validation experiments.\n\n"
    "Commands: estimate, weiszfeld, rates, coverage, tails, agree, calibrate\n"
    "Exit status: 0 ok, 2 usage/config, 3 data, 4 io, 5 numerical";

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{kDescription, "geomed"};
  app.set_config("--config", "", "Read options from a TOML/INI file; flags on the command line win");

  std::string command;
  std::string input;
  std::string generate;
  std::uint64_t count = 0;
  RunConfig cfg;
  std::size_t replications = 0;
  std::string output;
  std::string format = "json";
  std::string lambda_mode = "oracle";
  std::string plugin_center = "z_bar";
  double rm_scale_c = 0.0;

  app.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember({"estimate", "weiszfeld", "rates", "coverage", "tails", "agree", "calibrate"}));
  app.add_option("--input", input, "CSV file, one observation per row");
  app.add_option("--generate", generate,
                 "Synthetic source, e.g. gaussian-isotropic:dim=5,scale=1 "
                 "(kinds: gaussian-isotropic, gaussian-anisotropic, mixture-contaminated, "
                 "sphere-shell, discretized-process)");
  app.add_option("--count", count, "Observations to draw with --generate");
  app.add_option("--alpha", cfg.alpha, "Step-size exponent in (1/2, 1)")->capture_default_str();
  app.add_option("--c-gamma", cfg.c_gamma, "Step-size constant > 0")->capture_default_str();
  app.add_option("--delta", cfg.delta, "Confidence level parameter in (0, 1)")->capture_default_str();
  app.add_option("--checkpoints", cfg.checkpoints, "Ascending observation counts, comma separated")
      ->delimiter(',');
  app.add_option("--replications", replications, "Monte Carlo replications");
  auto* seed_opt = app.add_option("--seed", cfg.seed, "Master seed")->envname("GEOMED_SEED");
  app.add_option("--workers", cfg.workers, "Parallel workers")->capture_default_str();
  app.add_option("--output", output, "Output file (default: stdout)");
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  app.add_option("--lambda-min-mode", lambda_mode, "coverage: how lambda_min is obtained")
      ->check(CLI::IsMember({"oracle", "plug-in"}))
      ->capture_default_str();
  app.add_option("--plugin-center", plugin_center, "estimate: center of the plug-in lambda_min")
      ->check(CLI::IsMember({"z_bar", "weiszfeld"}))
      ->capture_default_str();
  app.add_option("--truncation-radius", cfg.truncation_radius, "Z_1 is reset to 0 beyond this norm")
      ->capture_default_str();
  auto* scale_opt = app.add_option("--rm-scale-c", rm_scale_c, "coverage: also score the Robbins-Monro ball");
  app.add_option("--reference-size", cfg.reference_size,
                 "Sample size behind surrogate medians and oracle lambda_min (0: automatic)");
  app.add_option("--tol", cfg.tol, "agree: distance threshold")->capture_default_str();
  app.add_option("--weiszfeld-tol", cfg.weiszfeld_tol, "Weiszfeld subgradient tolerance")->capture_default_str();
  app.add_option("--max-iter", cfg.max_iter, "Weiszfeld iteration cap")->capture_default_str();
  app.add_option("--t-grid", cfg.t_grid, "tails: deviation levels, comma separated")->delimiter(',');
  app.add_flag("--omit-timing", cfg.omit_timing, "Leave wall-clock metadata out of reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitConfig;
  }

  try {
    cfg.command = command_from_string(command);
    if (!input.empty()) cfg.input = input;
    if (!generate.empty()) {
      cfg.generator = parse_distribution_spec(generate);
      // The spec's own seed applies only when no --seed, GEOMED_SEED or config value is present.
      if (seed_opt->count() == 0) cfg.seed = cfg.generator->seed;
    }
    if (count > 0) cfg.count = count;
    if (replications > 0) cfg.replications = replications;
    if (!output.empty()) cfg.output = output;
    cfg.format = output_format_from_string(format);
    cfg.lambda_min_mode = lambda_min_mode_from_string(lambda_mode);
    cfg.plugin_center = plugin_center == "weiszfeld" ? PlugInCenter::Weiszfeld : PlugInCenter::ZBar;
    if (scale_opt->count() > 0) cfg.rm_scale_c = rm_scale_c;

    cfg.validate();
    const auto result = run_command(cfg);
    write_command_output(cfg, result, out);
    return kExitOk;
  } catch (const std::exception& e) {
    err << "geomed: " << e.what() << '\n';
    return exit_code_for_current_exception();
  }
}

}  // namespace geomed::cli
