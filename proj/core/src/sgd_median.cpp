#include "geomed/sgd_median.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geomed/errors.hpp"

namespace geomed {

StepSchedule::StepSchedule(double c_gamma, double alpha) : c_gamma_(c_gamma), alpha_(alpha) {
  if (!(c_gamma > 0.0) || !std::isfinite(c_gamma)) {
    throw ConfigError("step schedule: c_gamma must be > 0");
  }
  if (!(alpha > 0.5 && alpha < 1.0)) {
    throw ConfigError("step schedule: alpha must lie in (1/2, 1)");
  }
}

double StepSchedule::operator()(std::uint64_t n) const {
  if (n == 0) throw ConfigError("step schedule: n must be >= 1");
  return c_gamma_ * std::pow(static_cast<double>(n), -alpha_);
}

double step_size(const StepSchedule& sched, std::uint64_t n) { return sched(n); }

EstimatorState init(const Vector& x1, double truncation_radius) {
  if (!(truncation_radius > 0.0)) throw ConfigError("init: truncation radius must be > 0");
  if (x1.size() < 1) throw ConfigError("init: observation must have dim >= 1");
  if (!x1.allFinite()) throw DataError("init: observation has non-finite coordinates");
  EstimatorState s;
  s.n = 1;
  s.z = x1.norm() <= truncation_radius ? x1 : Vector(Vector::Zero(x1.size()));
  s.z_bar = s.z;
  return s;
}

StepOutcome update(EstimatorState& state, const Vector& x, const StepSchedule& sched,
                   const GradientOracle* oracle) {
  if (state.n == 0) throw ConfigError("update: estimator state is not initialized");
  require_same_dim(state.z, x, "update");
  if (!x.allFinite()) throw DataError("update: observation has non-finite coordinates");

  StepOutcome out;
  out.gamma = sched(state.n);
  Vector diff = x - state.z;
  const double dist = diff.norm();
  if (dist <= kDegeneracyTolerance * std::max(1.0, x.norm())) {
    out.skipped = true;
    ++state.skipped;
  } else {
    MartingaleIncrement inc;
    inc.u = -diff / dist;
    if (oracle != nullptr) inc.xi = (*oracle)(state.z) - inc.u;
    state.z.noalias() -= out.gamma * inc.u;
    out.step_length = out.gamma;
    out.increment = std::move(inc);
  }
  ++state.n;
  state.z_bar += (state.z - state.z_bar) / static_cast<double>(state.n);
  return out;
}

OnlineMedian::OnlineMedian(StepSchedule sched, double truncation_radius)
    : sched_(sched), truncation_radius_(truncation_radius) {
  if (!(truncation_radius > 0.0)) throw ConfigError("truncation radius must be > 0");
}

StepOutcome OnlineMedian::observe(const Vector& x) {
  if (state_.n == 0) {
    state_ = init(x, truncation_radius_);
    return StepOutcome{};
  }
  return update(state_, x, sched_);
}

void validate_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t stream_length) {
  std::uint64_t prev = 0;
  for (auto c : checkpoints) {
    if (c <= prev) throw ConfigError("checkpoints must be strictly ascending and >= 1");
    if (c > stream_length) {
      throw ConfigError("checkpoint " + std::to_string(c) + " exceeds stream length " +
                        std::to_string(stream_length));
    }
    prev = c;
  }
}

StreamResult run_stream(std::span<const Vector> observations, const StepSchedule& sched,
                        std::span<const std::uint64_t> checkpoints, double truncation_radius) {
  if (observations.empty()) throw DataError("run_stream: empty stream");
  validate_checkpoints(checkpoints, observations.size());

  StreamResult result;
  result.snapshots.reserve(checkpoints.size());
  OnlineMedian est(sched, truncation_radius);
  auto next_cp = checkpoints.begin();
  for (const auto& x : observations) {
    est.observe(x);
    if (next_cp != checkpoints.end() && est.state().n == *next_cp) {
      result.snapshots.push_back({est.state().n, est.state().z, est.state().z_bar});
      ++next_cp;
    }
  }
  result.state = est.state();
  return result;
}

}  // namespace geomed
