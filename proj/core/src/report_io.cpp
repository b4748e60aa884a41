#include <cmath>
#include <cstdio>
#include <sstream>

#include "geomed/cli_io.hpp"
#include "geomed/errors.hpp"

namespace geomed {

using nlohmann::json;

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json slope_json(const std::optional<SlopeFit>& fit) {
  if (!fit) return nullptr;
  return {{"slope", fit->slope},
          {"intercept", fit->intercept},
          {"slope_stderr", fit->slope_stderr},
          {"points", fit->points}};
}

std::optional<SlopeFit> slope_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  SlopeFit fit;
  fit.slope = j.at("slope").get<double>();
  fit.intercept = j.at("intercept").get<double>();
  fit.slope_stderr = j.at("slope_stderr").get<double>();
  fit.points = j.at("points").get<std::size_t>();
  return fit;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const EstimateResult& r) {
  json j;
  j["command"] = "estimate";
  j["n"] = r.n;
  j["dim"] = r.dim;
  j["skipped"] = r.skipped;
  j["schedule"] = {{"c_gamma", r.c_gamma}, {"alpha", r.alpha}};
  j["delta"] = r.delta;
  j["z"] = r.z;
  j["z_bar"] = r.z_bar;
  json snaps = json::array();
  for (const auto& s : r.snapshots) {
    snaps.push_back({{"n", s.n}, {"z", to_std(s.z)}, {"z_bar", to_std(s.z_bar)}});
  }
  j["snapshots"] = snaps;
  j["lambda_min"] = {{"value", opt(r.lambda_min)},
                     {"mode", r.lambda_min_mode},
                     {"center", r.lambda_min_center},
                     {"excluded", r.lambda_min_excluded}};
  if (r.ball) {
    j["ball"] = {{"center", to_std(r.ball->center)},
                 {"radius", r.ball->radius},
                 {"delta", r.ball->delta},
                 {"method", std::string(to_string(r.ball->method))},
                 {"lambda_min_used", opt(r.ball->lambda_min_used)},
                 {"n", r.ball->n},
                 {"n_delta", opt(r.ball->n_delta)},
                 {"below_validity_rank", r.ball->below_validity_rank}};
  } else {
    j["ball"] = nullptr;
  }
  j["ball_omitted_reason"] = opt(r.ball_omitted_reason);
  json warnings = json::array();
  if (r.uniqueness_warning) warnings.push_back("uniqueness-not-guaranteed-dim1");
  j["warnings"] = warnings;
  return j;
}

std::string to_csv(const EstimateResult& r) {
  std::ostringstream out;
  out << "quantity,index,value\n";
  auto row = [&](std::string_view q, std::optional<std::size_t> idx, const std::string& v) {
    out << q << ',';
    if (idx) out << *idx;
    out << ',' << v << '\n';
  };
  row("n", std::nullopt, std::to_string(r.n));
  row("dim", std::nullopt, std::to_string(r.dim));
  row("skipped", std::nullopt, std::to_string(r.skipped));
  row("c_gamma", std::nullopt, format_double(r.c_gamma));
  row("alpha", std::nullopt, format_double(r.alpha));
  row("delta", std::nullopt, format_double(r.delta));
  for (std::size_t i = 0; i < r.z.size(); ++i) row("z", i, format_double(r.z[i]));
  for (std::size_t i = 0; i < r.z_bar.size(); ++i) row("z_bar", i, format_double(r.z_bar[i]));
  for (const auto& s : r.snapshots) {
    for (Eigen::Index i = 0; i < s.z.size(); ++i) {
      row("snapshot_z@" + std::to_string(s.n), static_cast<std::size_t>(i), format_double(s.z[i]));
    }
    for (Eigen::Index i = 0; i < s.z_bar.size(); ++i) {
      row("snapshot_z_bar@" + std::to_string(s.n), static_cast<std::size_t>(i), format_double(s.z_bar[i]));
    }
  }
  if (r.lambda_min) row("lambda_min", std::nullopt, format_double(*r.lambda_min));
  row("lambda_min_excluded", std::nullopt, std::to_string(r.lambda_min_excluded));
  if (r.ball) {
    row("radius", std::nullopt, format_double(r.ball->radius));
    if (r.ball->n_delta) row("n_delta", std::nullopt, std::to_string(*r.ball->n_delta));
    row("below_validity_rank", std::nullopt, r.ball->below_validity_rank ? "1" : "0");
  }
  row("uniqueness_warning", std::nullopt, r.uniqueness_warning ? "1" : "0");
  return out.str();
}

json to_json(const ExperimentReport& r, bool include_runtime) {
  json j;
  j["kind"] = r.kind;
  j["config"] = {{"distribution", r.config.distribution},
                 {"c_gamma", r.config.c_gamma},
                 {"alpha", r.config.alpha},
                 {"replications", r.config.replications},
                 {"checkpoints", r.config.checkpoints},
                 {"delta", r.config.delta},
                 {"master_seed", r.config.master_seed},
                 {"truncation_radius", r.config.truncation_radius},
                 {"parallel_workers", r.config.parallel_workers}};
  j["reference"] = {{"value", r.reference.value},
                    {"surrogate", r.reference.surrogate},
                    {"sample_size", r.reference.sample_size},
                    {"gradient_norm", r.reference.gradient_norm},
                    {"standard_error", opt(r.reference.standard_error)}};
  json cps = json::array();
  for (const auto& c : r.checkpoints) {
    cps.push_back({{"n", c.n},
                   {"mse_rm", c.mse_rm},
                   {"mse_rm_stderr", c.mse_rm_stderr},
                   {"mse_avg", c.mse_avg},
                   {"mse_avg_stderr", c.mse_avg_stderr},
                   {"coverage_avg", opt(c.coverage_avg)},
                   {"coverage_avg_stderr", opt(c.coverage_avg_stderr)},
                   {"coverage_rm", opt(c.coverage_rm)},
                   {"coverage_rm_stderr", opt(c.coverage_rm_stderr)},
                   {"valid_replications", c.valid_replications}});
  }
  j["checkpoints"] = cps;
  j["rm_slope"] = slope_json(r.rm_slope);
  j["avg_slope"] = slope_json(r.avg_slope);
  j["errors"] = {{"rm", r.rm_errors}, {"avg", r.avg_errors}};
  j["lambda_min_mode"] = opt(r.lambda_min_mode);
  j["oracle_lambda_min"] = opt(r.oracle_lambda_min);
  j["lambda_min_used"] = r.lambda_min_used;
  j["invalid_replications"] = r.invalid_replications;
  j["rm_scale_c"] = opt(r.rm_scale_c);
  if (include_runtime) {
    j["runtime"] = {{"wall_seconds", r.runtime.wall_seconds}, {"workers", r.runtime.workers}};
  }
  return j;
}

ExperimentReport experiment_report_from_json(const json& j) {
  try {
    ExperimentReport r;
    r.kind = j.at("kind").get<std::string>();
    const auto& c = j.at("config");
    r.config.distribution = c.at("distribution").get<std::string>();
    r.config.c_gamma = c.at("c_gamma").get<double>();
    r.config.alpha = c.at("alpha").get<double>();
    r.config.replications = c.at("replications").get<std::size_t>();
    r.config.checkpoints = c.at("checkpoints").get<std::vector<std::uint64_t>>();
    r.config.delta = c.at("delta").get<double>();
    r.config.master_seed = c.at("master_seed").get<std::uint64_t>();
    r.config.truncation_radius = c.at("truncation_radius").get<double>();
    r.config.parallel_workers = c.at("parallel_workers").get<std::size_t>();
    const auto& ref = j.at("reference");
    r.reference.value = ref.at("value").get<std::vector<double>>();
    r.reference.surrogate = ref.at("surrogate").get<bool>();
    r.reference.sample_size = ref.at("sample_size").get<std::size_t>();
    r.reference.gradient_norm = ref.at("gradient_norm").get<double>();
    r.reference.standard_error = get_opt<double>(ref, "standard_error");
    for (const auto& cj : j.at("checkpoints")) {
      CheckpointStats cs;
      cs.n = cj.at("n").get<std::uint64_t>();
      cs.mse_rm = cj.at("mse_rm").get<double>();
      cs.mse_rm_stderr = cj.at("mse_rm_stderr").get<double>();
      cs.mse_avg = cj.at("mse_avg").get<double>();
      cs.mse_avg_stderr = cj.at("mse_avg_stderr").get<double>();
      cs.coverage_avg = get_opt<double>(cj, "coverage_avg");
      cs.coverage_avg_stderr = get_opt<double>(cj, "coverage_avg_stderr");
      cs.coverage_rm = get_opt<double>(cj, "coverage_rm");
      cs.coverage_rm_stderr = get_opt<double>(cj, "coverage_rm_stderr");
      cs.valid_replications = cj.at("valid_replications").get<std::size_t>();
      r.checkpoints.push_back(cs);
    }
    r.rm_slope = slope_from_json(j.at("rm_slope"));
    r.avg_slope = slope_from_json(j.at("avg_slope"));
    r.rm_errors = j.at("errors").at("rm").get<std::vector<std::vector<double>>>();
    r.avg_errors = j.at("errors").at("avg").get<std::vector<std::vector<double>>>();
    r.lambda_min_mode = get_opt<std::string>(j, "lambda_min_mode");
    r.oracle_lambda_min = get_opt<double>(j, "oracle_lambda_min");
    r.lambda_min_used = j.at("lambda_min_used").get<std::vector<std::vector<double>>>();
    r.invalid_replications = j.at("invalid_replications").get<std::vector<std::size_t>>();
    r.rm_scale_c = get_opt<double>(j, "rm_scale_c");
    if (j.contains("runtime")) {
      r.runtime.wall_seconds = j.at("runtime").at("wall_seconds").get<double>();
      r.runtime.workers = j.at("runtime").at("workers").get<std::size_t>();
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("experiment report: ") + e.what());
  }
}

std::vector<LongRow> long_table(const ExperimentReport& r) {
  std::vector<LongRow> rows;
  for (const auto& c : r.checkpoints) {
    const auto n = static_cast<double>(c.n);
    rows.push_back({"mse_rm", n, c.mse_rm, c.mse_rm_stderr});
    rows.push_back({"mse_avg", n, c.mse_avg, c.mse_avg_stderr});
    if (c.coverage_avg) rows.push_back({"coverage_avg", n, *c.coverage_avg, c.coverage_avg_stderr});
    if (c.coverage_rm) rows.push_back({"coverage_rm", n, *c.coverage_rm, c.coverage_rm_stderr});
  }
  if (r.rm_slope) rows.push_back({"rm_slope", std::nullopt, r.rm_slope->slope, r.rm_slope->slope_stderr});
  if (r.avg_slope) rows.push_back({"avg_slope", std::nullopt, r.avg_slope->slope, r.avg_slope->slope_stderr});
  if (r.oracle_lambda_min) rows.push_back({"oracle_lambda_min", std::nullopt, *r.oracle_lambda_min, std::nullopt});
  if (r.rm_scale_c) rows.push_back({"rm_scale_c", std::nullopt, *r.rm_scale_c, std::nullopt});
  return rows;
}

std::vector<LongRow> long_table(const std::vector<TailReport>& reports) {
  std::vector<LongRow> rows;
  for (const auto& rep : reports) {
    rows.push_back({rep.scenario + "/sigma_sq", std::nullopt, rep.sigma_sq, std::nullopt});
    rows.push_back({rep.scenario + "/big_n", std::nullopt, rep.big_n, std::nullopt});
    const double reps = static_cast<double>(rep.replications);
    for (const auto& row : rep.rows) {
      const double se = std::sqrt(row.empirical_tail * (1.0 - row.empirical_tail) / reps);
      rows.push_back({rep.scenario + "/empirical_tail", row.t, row.empirical_tail, se});
      rows.push_back({rep.scenario + "/bernstein_bound", row.t, row.bound, std::nullopt});
    }
  }
  return rows;
}

std::vector<LongRow> long_table(const AgreementResult& r, std::size_t count) {
  return {{"distance", static_cast<double>(count), r.distance, std::nullopt},
          {"pass", static_cast<double>(count), r.pass() ? 1.0 : 0.0, std::nullopt}};
}

std::string to_csv(const std::vector<LongRow>& rows) {
  std::ostringstream out;
  out << "quantity,n,value,stderr\n";
  for (const auto& r : rows) {
    out << r.quantity << ',';
    if (r.n) out << format_double(*r.n);
    out << ',' << format_double(r.value) << ',';
    if (r.stderr_value) out << format_double(*r.stderr_value);
    out << '\n';
  }
  return out.str();
}

json to_json(const std::vector<TailReport>& reports) {
  json arr = json::array();
  for (const auto& rep : reports) {
    json rows = json::array();
    for (const auto& row : rep.rows) {
      rows.push_back({{"t", row.t}, {"empirical_tail", row.empirical_tail}, {"bound", row.bound}});
    }
    arr.push_back({{"scenario", rep.scenario},
                   {"sigma_sq", rep.sigma_sq},
                   {"big_n", rep.big_n},
                   {"replications", rep.replications},
                   {"dominated", rep.dominated()},
                   {"rows", rows}});
  }
  return {{"kind", "tails"}, {"scenarios", arr}};
}

json to_json(const AgreementResult& r, std::size_t count, double tol) {
  return {{"kind", "agree"},
          {"count", count},
          {"tol", tol},
          {"distance", r.distance},
          {"status", std::string(to_string(r.status))},
          {"online_median", r.online_median},
          {"batch_median", r.batch_median},
          {"weiszfeld_iterations", r.weiszfeld_iterations}};
}

json to_json(const WeiszfeldSummary& s) {
  return {{"command", "weiszfeld"},
          {"count", s.count},
          {"median", to_std(s.result.median)},
          {"iterations", s.result.iterations},
          {"converged", s.result.converged},
          {"anchored", s.result.anchored},
          {"gradient_norm", s.result.gradient_norm},
          {"objective", s.objective}};
}

}  // namespace geomed
