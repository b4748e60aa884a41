#include "geomed/experiments.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "geomed/errors.hpp"

namespace geomed {

namespace {

// Substream indices reserved for harness-level samples, far from replication
// indices.
constexpr std::uint64_t kReferenceStream = 0xFFFF'FFFF'0000'0001ULL;
constexpr std::uint64_t kTailStreamBase = 0x7A11'0000'0000'0000ULL;

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Runs body(i) for i in [0, count) on `workers` threads. Results must be
// written to per-index slots; the first exception is rethrown.
template <typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

DistributionSpec seeded(const ExperimentConfig& cfg) {
  DistributionSpec spec = cfg.distribution;
  spec.seed = cfg.master_seed;
  return spec;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Standard error of the mean.
double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

struct ReplicationErrors {
  std::vector<double> rm;
  std::vector<double> avg;
  std::vector<double> lambda;  // coverage plug-in only
  bool valid = true;
};

void fill_mse(ExperimentReport& report, const std::vector<std::uint64_t>& checkpoints) {
  const std::size_t k_count = checkpoints.size();
  report.checkpoints.resize(k_count);
  std::vector<double> mse_rm(k_count), mse_avg(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    std::vector<double> sq_rm, sq_avg;
    sq_rm.reserve(report.rm_errors.size());
    sq_avg.reserve(report.rm_errors.size());
    for (std::size_t r = 0; r < report.rm_errors.size(); ++r) {
      sq_rm.push_back(report.rm_errors[r][k] * report.rm_errors[r][k]);
      sq_avg.push_back(report.avg_errors[r][k] * report.avg_errors[r][k]);
    }
    auto& cs = report.checkpoints[k];
    cs.n = checkpoints[k];
    cs.mse_rm = mean_of(sq_rm);
    cs.mse_rm_stderr = stderr_of(sq_rm, cs.mse_rm);
    cs.mse_avg = mean_of(sq_avg);
    cs.mse_avg_stderr = stderr_of(sq_avg, cs.mse_avg);
    cs.valid_replications = report.rm_errors.size();
    mse_rm[k] = cs.mse_rm;
    mse_avg[k] = cs.mse_avg;
  }
  report.rm_slope = fit_loglog_slope(checkpoints, mse_rm);
  report.avg_slope = fit_loglog_slope(checkpoints, mse_avg);
}

}  // namespace

std::vector<std::uint64_t> default_checkpoints() {
  std::vector<std::uint64_t> out;
  for (int i = 4; i <= 10; ++i) out.push_back(static_cast<std::uint64_t>(std::llround(std::pow(10.0, i / 2.0))));
  return out;
}

std::string_view to_string(LambdaMinMode mode) {
  return mode == LambdaMinMode::Oracle ? "oracle" : "plug-in";
}

LambdaMinMode lambda_min_mode_from_string(std::string_view name) {
  if (name == "oracle") return LambdaMinMode::Oracle;
  if (name == "plug-in") return LambdaMinMode::PlugIn;
  throw ConfigError("unknown lambda-min mode '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  distribution.validate();
  if (replications < 2) throw ConfigError("experiment: replications must be >= 2");
  if (checkpoints.empty()) throw ConfigError("experiment: checkpoints must be non-empty");
  validate_checkpoints(checkpoints, checkpoints.back());
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("experiment: delta must lie in (0, 1)");
  if (parallel_workers < 1) throw ConfigError("experiment: workers must be >= 1");
  if (!(truncation_radius > 0.0)) throw ConfigError("experiment: truncation radius must be > 0");
  if (true_median && true_median->size() != distribution.dim) {
    throw ConfigError("experiment: true median dimension does not match the distribution");
  }
  if (reference_sample_size != 0 && reference_sample_size < 10 * checkpoints.back()) {
    throw ConfigError("experiment: reference sample size must be >= 10x the largest checkpoint");
  }
  if (rm_scale_c && !(*rm_scale_c > 0.0)) throw ConfigError("experiment: rm scale_c must be > 0");
}

std::size_t ExperimentConfig::effective_reference_size() const {
  if (reference_sample_size != 0) return reference_sample_size;
  return std::max<std::size_t>(1'000'000, 10 * checkpoints.back());
}

ConfigEcho echo_config(const ExperimentConfig& cfg) {
  ConfigEcho echo;
  echo.distribution = format_distribution_spec(cfg.distribution);
  echo.c_gamma = cfg.schedule.c_gamma();
  echo.alpha = cfg.schedule.alpha();
  echo.replications = cfg.replications;
  echo.checkpoints = cfg.checkpoints;
  echo.delta = cfg.delta;
  echo.master_seed = cfg.master_seed;
  echo.truncation_radius = cfg.truncation_radius;
  echo.parallel_workers = cfg.parallel_workers;
  return echo;
}

bool same_results(const ExperimentReport& a, const ExperimentReport& b) {
  ExperimentReport x = a, y = b;
  x.runtime = y.runtime = RuntimeInfo{};
  x.config.parallel_workers = y.config.parallel_workers = 1;
  return x == y;
}

ReferenceMedian resolve_reference_median(const ExperimentConfig& cfg) {
  ReferenceMedian ref;
  if (cfg.true_median) {
    ref.value = to_std(*cfg.true_median);
    return ref;
  }
  if (auto known = cfg.distribution.known_median()) {
    ref.value = to_std(*known);
    return ref;
  }
  ref.surrogate = true;
  ref.sample_size = cfg.effective_reference_size();
  Sampler sampler(seeded(cfg), kReferenceStream);
  std::vector<Vector> points;
  sampler.fill(points, ref.sample_size);
  SampleSet sample(std::move(points));
  const auto wz = weiszfeld(sample, 1e-10, 100000);
  if (!wz.converged) {
    throw NumericalError("surrogate median: Weiszfeld did not converge (subgradient norm " +
                         std::to_string(wz.gradient_norm) + " after " +
                         std::to_string(wz.iterations) + " iterations)");
  }
  ref.value = to_std(wz.median);
  ref.gradient_norm = wz.gradient_norm;

  // Plug-in asymptotic covariance G^-1 S G^-1 / N of the empirical median.
  const auto hess = hessian(sample, wz.median, SingularPolicy::Exclude);
  Matrix s = Matrix::Zero(sample.dim(), sample.dim());
  std::size_t used = 0;
  for (const auto& x : sample.points()) {
    if (coincides(x, wz.median)) continue;
    const Vector u = (x - wz.median).normalized();
    s.noalias() += u * u.transpose();
    ++used;
  }
  s /= static_cast<double>(std::max<std::size_t>(used, 1));
  if (hess.lambda_min > 0.0) {
    Eigen::LDLT<Matrix> ldlt(hess.matrix);
    const Matrix ginv_s = ldlt.solve(s);
    const Matrix cov = ldlt.solve(ginv_s.transpose());
    ref.standard_error = std::sqrt(cov.trace() / static_cast<double>(ref.sample_size));
  }
  return ref;
}

std::optional<SlopeFit> fit_loglog_slope(const std::vector<std::uint64_t>& n,
                                         const std::vector<double>& values) {
  if (n.size() != values.size() || n.size() < 4) return std::nullopt;
  const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
  if (*lo == 0 || static_cast<double>(*hi) < 100.0 * static_cast<double>(*lo)) return std::nullopt;
  if (std::any_of(values.begin(), values.end(), [](double v) { return !(v > 0.0); })) return std::nullopt;

  const std::size_t k = n.size();
  double mx = 0.0, my = 0.0;
  std::vector<double> x(k), y(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = std::log(static_cast<double>(n[i]));
    y[i] = std::log(values[i]);
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(k);
  my /= static_cast<double>(k);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit fit;
  fit.points = k;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double res = y[i] - fit.intercept - fit.slope * x[i];
    ssr += res * res;
  }
  fit.slope_stderr = std::sqrt(ssr / static_cast<double>(k - 2) / sxx);
  return fit;
}

ExperimentReport rate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.kind = "rates";
  report.config = echo_config(cfg);
  report.reference = resolve_reference_median(cfg);
  const Vector m = from_std(report.reference.value);
  const auto spec = seeded(cfg);
  const auto& cps = cfg.checkpoints;

  std::vector<ReplicationErrors> reps(cfg.replications);
  parallel_for(cfg.replications, cfg.parallel_workers, [&](std::size_t r) {
    Sampler sampler(spec, r);
    OnlineMedian est(cfg.schedule, cfg.truncation_radius);
    auto& out = reps[r];
    out.rm.reserve(cps.size());
    out.avg.reserve(cps.size());
    std::size_t k = 0;
    for (std::uint64_t i = 1; i <= cps.back(); ++i) {
      est.observe(sampler.next());
      if (i == cps[k]) {
        out.rm.push_back((est.state().z - m).norm());
        out.avg.push_back((est.state().z_bar - m).norm());
        ++k;
      }
    }
  });

  for (auto& rep : reps) {
    report.rm_errors.push_back(std::move(rep.rm));
    report.avg_errors.push_back(std::move(rep.avg));
  }
  fill_mse(report, cps);
  report.runtime.workers = cfg.parallel_workers;
  report.runtime.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

ExperimentReport coverage_experiment(const ExperimentConfig& cfg, LambdaMinMode mode) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.kind = "coverage";
  report.config = echo_config(cfg);
  report.reference = resolve_reference_median(cfg);
  report.lambda_min_mode = std::string(to_string(mode));
  const Vector m = from_std(report.reference.value);
  const auto spec = seeded(cfg);
  const auto& cps = cfg.checkpoints;

  if (mode == LambdaMinMode::Oracle) {
    Sampler sampler(spec, kReferenceStream + 1);
    CurvatureMoments moments(m, SingularPolicy::Exclude);
    for (std::size_t i = 0; i < cfg.effective_reference_size(); ++i) moments.add(sampler.next());
    const double lm = moments.lambda_min();
    if (!(lm > 0.0)) {
      throw NumericalError("coverage: oracle lambda_min is not positive (" + std::to_string(lm) + ")");
    }
    report.oracle_lambda_min = lm;
  }

  std::vector<ReplicationErrors> reps(cfg.replications);
  parallel_for(cfg.replications, cfg.parallel_workers, [&](std::size_t r) {
    Sampler sampler(spec, r);
    OnlineMedian est(cfg.schedule, cfg.truncation_radius);
    auto& out = reps[r];
    std::vector<Vector> prefix;
    if (mode == LambdaMinMode::PlugIn) prefix.reserve(cps.back());
    std::size_t k = 0;
    for (std::uint64_t i = 1; i <= cps.back(); ++i) {
      Vector x = sampler.next();
      est.observe(x);
      if (mode == LambdaMinMode::PlugIn) prefix.push_back(std::move(x));
      if (i != cps[k]) continue;
      out.rm.push_back((est.state().z - m).norm());
      out.avg.push_back((est.state().z_bar - m).norm());
      if (mode == LambdaMinMode::PlugIn) {
        CurvatureMoments moments(est.state().z_bar, SingularPolicy::Exclude);
        for (const auto& p : prefix) moments.add(p);
        double lm = 0.0;
        try {
          lm = moments.used() > 0 ? moments.lambda_min() : 0.0;
        } catch (const NumericalError&) {
          lm = 0.0;
        }
        if (!(lm > 0.0)) out.valid = false;
        out.lambda.push_back(lm);
      } else {
        out.lambda.push_back(*report.oracle_lambda_min);
      }
      ++k;
    }
  });

  for (std::size_t r = 0; r < reps.size(); ++r) {
    if (!reps[r].valid) report.invalid_replications.push_back(r);
    report.rm_errors.push_back(std::move(reps[r].rm));
    report.avg_errors.push_back(std::move(reps[r].avg));
    report.lambda_min_used.push_back(std::move(reps[r].lambda));
  }
  fill_mse(report, cps);

  const auto coverage = rescaled_coverage(report, 1.0);
  std::vector<double> rm_cov(cps.size(), 0.0);
  std::size_t valid = 0;
  for (std::size_t r = 0; r < reps.size(); ++r) {
    if (!reps[r].valid) continue;
    ++valid;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      if (cfg.rm_scale_c &&
          report.rm_errors[r][k] <= rm_radius_shape(cps[k], cfg.delta, cfg.schedule.alpha(), *cfg.rm_scale_c)) {
        rm_cov[k] += 1.0;
      }
    }
  }
  for (std::size_t k = 0; k < cps.size(); ++k) {
    auto& cs = report.checkpoints[k];
    cs.valid_replications = valid;
    if (valid == 0) continue;
    const double vn = static_cast<double>(valid);
    cs.coverage_avg = coverage[k];
    cs.coverage_avg_stderr = std::sqrt(coverage[k] * (1.0 - coverage[k]) / vn);
    if (cfg.rm_scale_c) {
      const double p = rm_cov[k] / vn;
      cs.coverage_rm = p;
      cs.coverage_rm_stderr = std::sqrt(p * (1.0 - p) / vn);
    }
  }
  report.runtime.workers = cfg.parallel_workers;
  report.runtime.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<double> rescaled_coverage(const ExperimentReport& report, double radius_factor) {
  if (report.lambda_min_used.size() != report.avg_errors.size()) {
    throw ConfigError("rescaled_coverage: report carries no lambda_min values");
  }
  const auto& cps = report.config.checkpoints;
  std::vector<double> covered(cps.size(), 0.0);
  std::size_t valid = 0;
  for (std::size_t r = 0; r < report.avg_errors.size(); ++r) {
    if (std::binary_search(report.invalid_replications.begin(), report.invalid_replications.end(), r)) {
      continue;
    }
    ++valid;
    for (std::size_t k = 0; k < cps.size(); ++k) {
      const double radius = radius_factor * averaged_radius(cps[k], report.config.delta,
                                                            report.lambda_min_used[r][k]);
      if (report.avg_errors[r][k] <= radius) covered[k] += 1.0;
    }
  }
  if (valid > 0) {
    for (auto& c : covered) c /= static_cast<double>(valid);
  }
  return covered;
}

double calibrate_rm_constant(const std::vector<std::vector<double>>& rm_errors,
                             const std::vector<std::uint64_t>& checkpoints, double delta,
                             double alpha) {
  if (rm_errors.empty()) throw ConfigError("calibrate: no replications");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("calibrate: delta must lie in (0, 1)");
  const std::size_t reps = rm_errors.size();
  const auto rank = static_cast<std::size_t>(std::ceil((1.0 - delta) * static_cast<double>(reps)));
  const std::size_t idx = std::clamp<std::size_t>(rank, 1, reps) - 1;
  const double log_term = std::log(4.0 / delta);
  double scale_c = 0.0;
  std::vector<double> normalized(reps);
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    const double factor = std::pow(static_cast<double>(checkpoints[k]), alpha / 2.0) / log_term;
    for (std::size_t r = 0; r < reps; ++r) normalized[r] = rm_errors[r].at(k) * factor;
    std::nth_element(normalized.begin(), normalized.begin() + static_cast<std::ptrdiff_t>(idx),
                     normalized.end());
    scale_c = std::max(scale_c, normalized[idx]);
  }
  return scale_c;
}

ExperimentReport calibrate_rm_constant(const ExperimentConfig& cfg) {
  ExperimentReport report = rate_experiment(cfg);
  report.kind = "calibrate";
  const double c = calibrate_rm_constant(report.rm_errors, cfg.checkpoints, cfg.delta, cfg.schedule.alpha());
  report.rm_scale_c = c;
  const double reps = static_cast<double>(report.rm_errors.size());
  for (std::size_t k = 0; k < cfg.checkpoints.size(); ++k) {
    // Compare on the normalized scale the constant was taken from, so the
    // order statistic itself is counted as covered despite rounding.
    const double factor = std::pow(static_cast<double>(cfg.checkpoints[k]), cfg.schedule.alpha() / 2.0) /
                          std::log(4.0 / cfg.delta);
    double covered = 0.0;
    for (const auto& errs : report.rm_errors) covered += errs[k] * factor <= c ? 1.0 : 0.0;
    const double p = covered / reps;
    report.checkpoints[k].coverage_rm = p;
    report.checkpoints[k].coverage_rm_stderr = std::sqrt(p * (1.0 - p) / reps);
  }
  return report;
}

std::string_view to_string(IncrementLaw law) {
  switch (law) {
    case IncrementLaw::AxisCoin: return "axis-coin";
    case IncrementLaw::SphereUniform: return "sphere-uniform";
    case IncrementLaw::BallUniform: return "ball-uniform";
  }
  return "unknown";
}

std::string_view to_string(WeightProfile profile) {
  switch (profile) {
    case WeightProfile::Constant: return "constant";
    case WeightProfile::PowerDecay: return "power-decay";
    case WeightProfile::Contracted: return "contracted";
    case WeightProfile::Zero: return "zero";
  }
  return "unknown";
}

void TailScenario::validate() const {
  if (dim < 1) throw ConfigError("tail scenario: dim must be >= 1");
  if (steps < 1) throw ConfigError("tail scenario: steps must be >= 1");
  if (!(weight_scale >= 0.0)) throw ConfigError("tail scenario: weight scale must be >= 0");
  if (weights == WeightProfile::Contracted && !(lambda > 0.0 && lambda * weight_scale < 1.0)) {
    throw ConfigError("tail scenario: contracted weights need 0 < lambda * scale < 1");
  }
}

std::vector<TailScenario> default_tail_scenarios() {
  return {
      {"coin-constant", IncrementLaw::AxisCoin, 2, 1000, WeightProfile::Constant, 1.0, 2.0 / 3.0, 0.5},
      {"sphere-power", IncrementLaw::SphereUniform, 3, 1000, WeightProfile::PowerDecay, 1.0, 2.0 / 3.0, 0.5},
      {"ball-contracted", IncrementLaw::BallUniform, 5, 1000, WeightProfile::Contracted, 1.0, 2.0 / 3.0, 0.5},
  };
}

std::vector<double> tail_weights(const TailScenario& s) {
  s.validate();
  std::vector<double> w(s.steps, 0.0);
  switch (s.weights) {
    case WeightProfile::Constant:
      std::fill(w.begin(), w.end(), s.weight_scale);
      break;
    case WeightProfile::PowerDecay:
      for (std::uint64_t k = 1; k <= s.steps; ++k) w[k - 1] = s.weight_scale * std::pow(static_cast<double>(k), -s.alpha);
      break;
    case WeightProfile::Contracted: {
      double tail_product = 1.0;
      for (std::uint64_t k = s.steps; k >= 1; --k) {
        const double gamma = s.weight_scale * std::pow(static_cast<double>(k), -s.alpha);
        w[k - 1] = gamma * tail_product;
        tail_product *= 1.0 - s.lambda * gamma;
      }
      break;
    }
    case WeightProfile::Zero:
      break;
  }
  return w;
}

std::vector<double> default_t_grid(const TailScenario& scenario) {
  const auto w = tail_weights(scenario);
  double sigma_sq = 0.0;
  for (double x : w) sigma_sq += x * x;
  const double sigma = sigma_sq > 0.0 ? std::sqrt(sigma_sq) : 1.0;
  return {0.5 * sigma, 1.0 * sigma, 2.0 * sigma, 3.0 * sigma, 4.0 * sigma};
}

bool TailReport::dominated() const {
  return std::all_of(rows.begin(), rows.end(), [](const TailRow& r) { return r.empirical_tail <= r.bound; });
}

TailReport martingale_tail_experiment(const TailScenario& scenario, const std::vector<double>& t_grid,
                                      std::size_t replications, std::uint64_t seed,
                                      std::size_t workers) {
  scenario.validate();
  if (replications < 1) throw ConfigError("tail experiment: replications must be >= 1");
  if (t_grid.empty()) throw ConfigError("tail experiment: empty t grid");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw ConfigError("tail experiment: grid values must be > 0");
  }
  const auto weights = tail_weights(scenario);
  const int d = scenario.dim;
  const double second_moment =
      scenario.law == IncrementLaw::BallUniform ? static_cast<double>(d) / (d + 2.0) : 1.0;

  TailReport report;
  report.scenario = scenario.name;
  report.replications = replications;
  for (double w : weights) {
    report.sigma_sq += w * w * second_moment;
    report.big_n = std::max(report.big_n, std::abs(w));
  }

  std::vector<double> norms(replications);
  parallel_for(replications, workers, [&](std::size_t r) {
    std::mt19937_64 engine(substream_seed(seed, kTailStreamBase + r));
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform;
    Vector sum = Vector::Zero(d);
    Vector xi(d);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      switch (scenario.law) {
        case IncrementLaw::AxisCoin:
          xi.setZero();
          xi[0] = uniform(engine) < 0.5 ? -1.0 : 1.0;
          break;
        case IncrementLaw::SphereUniform:
        case IncrementLaw::BallUniform: {
          double r2 = 0.0;
          do {
            for (int j = 0; j < d; ++j) xi[j] = normal(engine);
            r2 = xi.squaredNorm();
          } while (r2 == 0.0);
          double radius = 1.0;
          if (scenario.law == IncrementLaw::BallUniform) radius = std::pow(uniform(engine), 1.0 / d);
          xi *= radius / std::sqrt(r2);
          break;
        }
      }
      const double bound = std::abs(weights[k]);
      if (std::abs(weights[k]) * xi.norm() > bound * (1.0 + 1e-12)) {
        throw NumericalError("tail experiment: increment " + std::to_string(k) +
                             " exceeds its declared bound");
      }
      sum.noalias() += weights[k] * xi;
    }
    norms[r] = sum.norm();
  });

  for (double t : t_grid) {
    const auto hits = std::count_if(norms.begin(), norms.end(), [t](double s) { return s >= t; });
    TailRow row;
    row.t = t;
    row.empirical_tail = static_cast<double>(hits) / static_cast<double>(replications);
    row.bound = bernstein_tail({report.sigma_sq, report.big_n, t});
    report.rows.push_back(row);
  }
  return report;
}

std::string_view to_string(AgreementStatus status) {
  switch (status) {
    case AgreementStatus::Pass: return "pass";
    case AgreementStatus::Fail: return "fail";
    case AgreementStatus::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

AgreementResult estimator_agreement(const SampleSet& sample, const StepSchedule& sched, double tol,
                                    std::uint64_t seed, double truncation_radius) {
  if (sample.count() < 10) throw ConfigError("estimator agreement: need at least 10 points");
  if (!(tol > 0.0)) throw ConfigError("estimator agreement: tol must be > 0");

  std::vector<std::size_t> order(sample.count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 engine(substream_seed(seed, 0));
  std::shuffle(order.begin(), order.end(), engine);

  OnlineMedian est(sched, truncation_radius);
  for (auto i : order) est.observe(sample[i]);

  const auto wz = weiszfeld(sample, 1e-10, 100000);
  AgreementResult out;
  out.online_median = to_std(est.state().z_bar);
  out.batch_median = to_std(wz.median);
  out.weiszfeld_iterations = wz.iterations;
  out.distance = (est.state().z_bar - wz.median).norm();
  if (!wz.converged) {
    out.status = AgreementStatus::Inconclusive;
  } else {
    out.status = out.distance <= tol ? AgreementStatus::Pass : AgreementStatus::Fail;
  }
  return out;
}

}  // namespace geomed
