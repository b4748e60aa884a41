#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "geomed/bounds.hpp"
#include "geomed/distribution.hpp"
#include "geomed/geometry_oracle.hpp"
#include "geomed/sgd_median.hpp"
#include "geomed/vector.hpp"

namespace geomed {

// {10^2, 10^2.5, ..., 10^5}, rounded.
std::vector<std::uint64_t> default_checkpoints();

enum class LambdaMinMode { Oracle, PlugIn };

std::string_view to_string(LambdaMinMode mode);
LambdaMinMode lambda_min_mode_from_string(std::string_view name);

/// Monte Carlo configuration. Replication r draws its observations from the
/// substream (master_seed, r); the distribution's own seed is ignored.
struct ExperimentConfig {
  DistributionSpec distribution;
  StepSchedule schedule;
  std::size_t replications = 200;
  std::vector<std::uint64_t> checkpoints = default_checkpoints();
  double delta = 0.05;
  std::optional<Vector> true_median;
  std::size_t parallel_workers = 1;
  std::uint64_t master_seed = 0;
  double truncation_radius = kDefaultTruncationRadius;
  // Size of the independent sample behind the surrogate median and the
  // oracle lambda_min. 0 selects max(10^6, 10 * largest checkpoint).
  std::size_t reference_sample_size = 0;
  // When set, coverage runs also score the Robbins-Monro ball with this constant.
  std::optional<double> rm_scale_c;

  // Throws ConfigError on an infeasible configuration.
  void validate() const;
  std::size_t effective_reference_size() const;
};

/// Reference point the errors are measured against.
struct ReferenceMedian {
  std::vector<double> value;
  bool surrogate = false;
  std::size_t sample_size = 0;
  double gradient_norm = 0.0;   // Weiszfeld stopping value on the surrogate sample
  std::optional<double> standard_error;  // sqrt(tr(G^-1 S G^-1)/N) plug-in estimate

  bool operator==(const ReferenceMedian&) const = default;
};

ReferenceMedian resolve_reference_median(const ExperimentConfig& cfg);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;

  bool operator==(const SlopeFit&) const = default;
};

/// OLS of log(values) on log(n). Empty unless there are >= 4 points spanning
/// >= 2 decades of n and all values are positive.
std::optional<SlopeFit> fit_loglog_slope(const std::vector<std::uint64_t>& n,
                                         const std::vector<double>& values);

struct CheckpointStats {
  std::uint64_t n = 0;
  double mse_rm = 0.0;
  double mse_rm_stderr = 0.0;
  double mse_avg = 0.0;
  double mse_avg_stderr = 0.0;
  std::optional<double> coverage_avg;
  std::optional<double> coverage_avg_stderr;
  std::optional<double> coverage_rm;
  std::optional<double> coverage_rm_stderr;
  std::size_t valid_replications = 0;

  bool operator==(const CheckpointStats&) const = default;
};

struct RuntimeInfo {
  double wall_seconds = 0.0;
  std::size_t workers = 1;

  bool operator==(const RuntimeInfo&) const = default;
};

struct ConfigEcho {
  std::string distribution;
  double c_gamma = 0.0;
  double alpha = 0.0;
  std::size_t replications = 0;
  std::vector<std::uint64_t> checkpoints;
  double delta = 0.0;
  std::uint64_t master_seed = 0;
  double truncation_radius = 0.0;
  std::size_t parallel_workers = 1;

  bool operator==(const ConfigEcho&) const = default;
};

ConfigEcho echo_config(const ExperimentConfig& cfg);

struct ExperimentReport {
  std::string kind;  // "rates", "coverage" or "calibrate"
  ConfigEcho config;
  ReferenceMedian reference;
  std::vector<CheckpointStats> checkpoints;
  std::optional<SlopeFit> rm_slope;
  std::optional<SlopeFit> avg_slope;
  // Per replication (outer) and checkpoint (inner) distances to the reference.
  std::vector<std::vector<double>> rm_errors;
  std::vector<std::vector<double>> avg_errors;
  // Coverage runs: lambda_min used per replication and checkpoint (NaN-free;
  // invalid replications are listed in `invalid_replications`).
  std::optional<std::string> lambda_min_mode;
  std::optional<double> oracle_lambda_min;
  std::vector<std::vector<double>> lambda_min_used;
  std::vector<std::size_t> invalid_replications;
  std::optional<double> rm_scale_c;  // calibrate runs
  RuntimeInfo runtime;

  bool operator==(const ExperimentReport&) const = default;
};

// Equality of everything that must not depend on scheduling: ignores the
// runtime block and the worker count in the echo.
bool same_results(const ExperimentReport& a, const ExperimentReport& b);

/// Monte Carlo estimate of E|Z_n - m|^2 and E|Zbar_n - m|^2 per checkpoint
/// with log-log slope fits.
ExperimentReport rate_experiment(const ExperimentConfig& cfg);

/// Empirical coverage of the averaged ball at each checkpoint. In oracle mode
/// lambda_min is computed once at the reference median on an independent
/// sample; in plug-in mode it is computed per replication at Zbar_n from the
/// observed prefix. Replications with a non-positive lambda_min are excluded
/// and listed.
ExperimentReport coverage_experiment(const ExperimentConfig& cfg, LambdaMinMode mode);

/// Coverage recomputed from a coverage report's stored errors with every
/// averaged radius multiplied by `radius_factor`.
std::vector<double> rescaled_coverage(const ExperimentReport& coverage_report, double radius_factor);

/// Smallest scale_c such that, at every checkpoint, the empirical (1 - delta)
/// quantile of |Z_n - m| n^(alpha/2) / ln(4/delta) is <= scale_c. The quantile
/// is the order statistic of rank ceil((1 - delta) R).
double calibrate_rm_constant(const std::vector<std::vector<double>>& rm_errors,
                             const std::vector<std::uint64_t>& checkpoints, double delta,
                             double alpha);
ExperimentReport calibrate_rm_constant(const ExperimentConfig& cfg);

// Martingale tail simulation.

enum class IncrementLaw {
  AxisCoin,       // +-e1 with probability 1/2 each
  SphereUniform,  // uniform on the unit sphere
  BallUniform,    // uniform in the unit ball
};

enum class WeightProfile {
  Constant,   // w_k = scale
  PowerDecay, // w_k = scale * k^(-alpha)
  Contracted, // w_k = gamma_k prod_{j=k+1}^{n-1} (1 - lambda gamma_j), gamma_k = scale k^(-alpha)
  Zero,
};

std::string_view to_string(IncrementLaw law);
std::string_view to_string(WeightProfile profile);

struct TailScenario {
  std::string name;
  IncrementLaw law = IncrementLaw::AxisCoin;
  int dim = 2;
  std::uint64_t steps = 1000;
  WeightProfile weights = WeightProfile::Constant;
  double weight_scale = 1.0;
  double alpha = 2.0 / 3.0;
  double lambda = 0.5;

  void validate() const;
};

// The three shipped scenarios.
std::vector<TailScenario> default_tail_scenarios();

struct TailRow {
  double t = 0.0;
  double empirical_tail = 0.0;
  double bound = 0.0;

  bool operator==(const TailRow&) const = default;
};

struct TailReport {
  std::string scenario;
  double sigma_sq = 0.0;  // sum of per-step second-moment bounds
  double big_n = 0.0;     // largest per-step magnitude bound
  std::size_t replications = 0;
  std::vector<TailRow> rows;

  bool dominated() const;
  bool operator==(const TailReport&) const = default;
};

std::vector<double> tail_weights(const TailScenario& scenario);

/// Simulates |sum_k w_k xi_k| over `replications` runs and compares its tail
/// frequency P[|S| >= t] against bernstein_tail. Throws NumericalError if a
/// simulated increment exceeds its declared bound.
TailReport martingale_tail_experiment(const TailScenario& scenario, const std::vector<double>& t_grid,
                                      std::size_t replications, std::uint64_t seed,
                                      std::size_t workers = 1);

// Grid of multiples of sqrt(sigma^2) used when none is given.
std::vector<double> default_t_grid(const TailScenario& scenario);

enum class AgreementStatus { Pass, Fail, Inconclusive };
std::string_view to_string(AgreementStatus status);

struct AgreementResult {
  double distance = 0.0;
  AgreementStatus status = AgreementStatus::Inconclusive;
  std::vector<double> online_median;
  std::vector<double> batch_median;
  std::size_t weiszfeld_iterations = 0;

  bool pass() const { return status == AgreementStatus::Pass; }
};

/// Runs the online estimator once over a seeded random permutation of the
/// sample and compares Zbar_n with the Weiszfeld median.
AgreementResult estimator_agreement(const SampleSet& sample, const StepSchedule& sched, double tol,
                                    std::uint64_t seed = 0,
                                    double truncation_radius = kDefaultTruncationRadius);

}  // namespace geomed
