// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "geomed/bounds.hpp"
#include "geomed/distribution.hpp"
#include "geomed/experiments.hpp"
#include "geomed/geometry_oracle.hpp"
#include "geomed/sgd_median.hpp"
#include "test_support.hpp"

namespace {

using namespace geomed;
using geomed::testing::batch_mean;
using geomed::testing::gaussian_points;
using geomed::testing::random_in_ball;
using geomed::testing::random_orthogonal;
using geomed::testing::random_unit;
using geomed::testing::random_vector;

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentReport& rates_report() {
  static ExperimentReport report = [] {
    ExperimentConfig cfg;
    cfg.distribution.dim = 5;
    cfg.schedule = StepSchedule(1.0, 2.0 / 3.0);
    cfg.replications = 200;
    cfg.checkpoints = default_checkpoints();
    cfg.master_seed = 20240601;
    return rate_experiment(cfg);
  }();
  return report;
}

Outcome criterion1() {
  const auto& fit = rates_report().rm_slope;
  if (!fit) return {false, "no slope fit"};
  const double target = -2.0 / 3.0;
  const bool within = std::abs(fit->slope - target) <= 0.15;
  const bool not_parametric = fit->slope + 1.0 > 2.0 * fit->slope_stderr;
  return {within && not_parametric,
          fmt("slope %.4f (se %.4f), target -0.6667 +- 0.15, distance to -1 %.2f se", fit->slope,
              fit->slope_stderr, (fit->slope + 1.0) / fit->slope_stderr)};
}

Outcome criterion2() {
  const auto& fit = rates_report().avg_slope;
  if (!fit) return {false, "no slope fit"};
  return {std::abs(fit->slope + 1.0) <= 0.15,
          fmt("slope %.4f (se %.4f), target -1 +- 0.15", fit->slope, fit->slope_stderr)};
}

Outcome criterion3() {
  ExperimentConfig cfg;
  cfg.distribution.dim = 5;
  cfg.replications = 500;
  cfg.checkpoints = {10000};
  cfg.delta = 0.05;
  cfg.master_seed = 31;
  std::string detail;
  bool pass = true;
  for (auto mode : {LambdaMinMode::Oracle, LambdaMinMode::PlugIn}) {
    const auto r = coverage_experiment(cfg, mode);
    const double cov = r.checkpoints[0].coverage_avg.value_or(0.0);
    pass = pass && cov >= 0.95 && r.invalid_replications.empty();
    detail += fmt("%s coverage %.4f (invalid %zu); ", std::string(to_string(mode)).c_str(), cov,
                  r.invalid_replications.size());
  }
  detail += "threshold 0.95 at delta 0.05, n 10^4, R 500";
  return {pass, detail};
}

Outcome criterion4() {
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 41;
  for (const auto& sc : default_tail_scenarios()) {
    const auto r = martingale_tail_experiment(sc, default_t_grid(sc), 10000, seed++);
    double worst = -1.0;
    for (const auto& row : r.rows) worst = std::max(worst, row.empirical_tail / row.bound);
    pass = pass && r.dominated();
    detail += fmt("%s max tail/bound %.3f; ", sc.name.c_str(), worst);
  }
  detail += "R 10^4";
  return {pass, detail};
}

Matrix assembled_hessian(const std::vector<Vector>& xs, const Vector& h) {
  const auto d = h.size();
  Matrix m = Matrix::Zero(d, d);
  for (const auto& x : xs) {
    const double r = (x - h).norm();
    const Vector u = (x - h) / r;
    m += (Matrix::Identity(d, d) - u * u.transpose()) / r;
  }
  return m / static_cast<double>(xs.size());
}

Outcome criterion5() {
  std::mt19937_64 rng(51);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 9;
    const auto pts = gaussian_points(rng, 400, d);
    const Vector c = random_vector(rng, d, 0.3);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(assembled_hessian(pts, c));
    const double dense = eig.eigenvalues().minCoeff();
    const double identity = lambda_min_estimate(SampleSet(pts), c);
    worst = std::max(worst, std::abs(identity - dense) / std::abs(dense));
  }
  return {worst <= 1e-10, fmt("max relative gap %.3e over 50 samples, d 2..10, tolerance 1e-10", worst)};
}

// Weiszfeld objective traces collected by criteria 6 and 7, with the
// evaluation rounding floor of each: every term |X - h| - |X| is bounded by
// |h|, so the mean carries an error of a few eps |h|.
struct Trace {
  std::vector<double> values;
  double floor = 0.0;
};
std::vector<Trace> weiszfeld_traces;

void record_trace(const SampleSet& sample, const WeiszfeldResult& w) {
  Vector mean = Vector::Zero(sample.dim());
  for (const auto& x : sample.points()) mean += x;
  mean /= static_cast<double>(sample.count());
  const double h = 2.0 * std::max(mean.norm(), w.median.norm());
  weiszfeld_traces.push_back({w.objective_trace, 16.0 * std::numeric_limits<double>::epsilon() * h});
}

Outcome criterion6() {
  std::mt19937_64 rng(61);
  std::size_t violations = 0, checks = 0;
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const int d = 2 + s % 6;
    const SampleSet sample(gaussian_points(rng, 1000, d));
    const auto m = weiszfeld(sample);
    record_trace(sample, m);
    for (int k = 0; k < 100; ++k) {
      const auto c = linearization_residual(sample, m.median, random_in_ball(rng, m.median));
      violations += c.residual_norm > c.bound;
      worst = std::max(worst, c.residual_norm / c.bound);
      ++checks;
    }
  }
  return {violations == 0, fmt("%zu violations in %zu checks, max residual/bound %.3f", violations, checks, worst)};
}

Outcome criterion7() {
  DistributionSpec spec;
  spec.dim = 5;
  spec.seed = 71;
  const SampleSet sample(geomed::sample(spec, 100000));
  const auto r = estimator_agreement(sample, StepSchedule(), 0.05, 72);
  const auto w = weiszfeld(sample);
  record_trace(sample, w);
  std::size_t increases = 0;
  double worst = 0.0;
  for (const auto& trace : weiszfeld_traces)
    for (std::size_t k = 1; k < trace.values.size(); ++k) {
      const double rise = (trace.values[k] - trace.values[k - 1]) / trace.floor;
      worst = std::max(worst, rise);
      increases += rise > 1.0;
    }
  return {r.pass() && increases == 0,
          fmt("|Zbar - Weiszfeld| %.4f (tolerance 0.05, status %s); objective increases %zu over %zu runs, "
              "largest rise %.2f of the rounding floor",
              r.distance, std::string(to_string(r.status)).c_str(), increases, weiszfeld_traces.size(), worst)};
}

Outcome criterion8() {
  std::mt19937_64 rng(81);
  double step_gap = 0, avg_gap = 0, trans_gap = 0, rot_gap = 0, hvp_gap = 0;
  for (int d : {2, 5, 10}) {
    const auto obs = gaussian_points(rng, 5000, d);
    const StepSchedule sched;
    auto s = init(obs[0]);
    std::vector<Vector> iterates{s.z};
    for (std::size_t i = 1; i < obs.size(); ++i) {
      const Vector before = s.z;
      const double gamma = sched(s.n);
      update(s, obs[i], sched);
      step_gap = std::max(step_gap, std::abs((s.z - before).norm() - gamma) / gamma);
      iterates.push_back(s.z);
    }
    avg_gap = std::max(avg_gap, (s.z_bar - batch_mean(iterates)).norm());

    const Vector shift = random_vector(rng, d, 3.0);
    const Matrix q = random_orthogonal(rng, d);
    std::vector<Vector> shifted, rotated;
    for (const auto& x : obs) {
      shifted.push_back(x + shift);
      rotated.push_back(q * x);
    }
    const std::vector<std::uint64_t> none;
    const auto base = run_stream(obs, sched, none);
    const auto tr = run_stream(shifted, sched, none);
    const auto rot = run_stream(rotated, sched, none);
    trans_gap = std::max(trans_gap, (tr.state.z_bar - base.state.z_bar - shift).norm());
    rot_gap = std::max(rot_gap, (rot.state.z_bar - q * base.state.z_bar).norm());

    const SampleSet sample(std::vector<Vector>(obs.begin(), obs.begin() + 500));
    for (int k = 0; k < 10; ++k) {
      const Vector h = random_vector(rng, d, 0.5);
      const Vector v = random_unit(rng, d);
      const double eps = 1e-5;
      const Vector fd = (gradient(sample, h + eps * v) - gradient(sample, h - eps * v)) / (2 * eps);
      const Vector hv = hessian(sample, h).matrix * v;
      hvp_gap = std::max(hvp_gap, (fd - hv).norm() / hv.norm());
    }
  }

  ExperimentConfig cfg;
  cfg.distribution.dim = 3;
  cfg.replications = 16;
  cfg.checkpoints = {100, 1000, 10000};
  cfg.master_seed = 82;
  const auto one = rate_experiment(cfg);
  cfg.parallel_workers = 4;
  const bool identical = same_results(one, rate_experiment(cfg));

  const bool pass = step_gap <= 1e-10 && avg_gap <= 1e-10 && trans_gap <= 1e-10 && rot_gap <= 1e-10 &&
                    hvp_gap <= 1e-3 && identical;
  return {pass, fmt("step %.1e, average %.1e, translation %.1e, rotation %.1e, Hessian-vector %.1e, "
                    "workers 1 vs 4 %s",
                    step_gap, avg_gap, trans_gap, rot_gap, hvp_gap, identical ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 Robbins-Monro MSE slope", criterion1},
      {"2 averaged MSE slope", criterion2},
      {"3 averaged-ball coverage", criterion3},
      {"4 Bernstein tail dominance", criterion4},
      {"5 lambda_min identity", criterion5},
      {"6 linearization bound", criterion6},
      {"7 online vs Weiszfeld", criterion7},
      {"8 structural invariants", criterion8},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("[%s] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
