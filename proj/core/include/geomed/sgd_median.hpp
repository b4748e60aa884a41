#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "geomed/vector.hpp"

namespace geomed {

/// Gain sequence gamma_n = c_gamma * n^(-alpha) with 1/2 < alpha < 1, which
/// gives sum gamma_n = inf and sum gamma_n^2 < inf.
class StepSchedule {
 public:
  static constexpr double kDefaultCGamma = 1.0;
  static constexpr double kDefaultAlpha = 2.0 / 3.0;

  StepSchedule() = default;
  // Throws ConfigError unless c_gamma > 0 and 1/2 < alpha < 1.
  StepSchedule(double c_gamma, double alpha);

  double c_gamma() const { return c_gamma_; }
  double alpha() const { return alpha_; }

  // Throws ConfigError for n == 0.
  double operator()(std::uint64_t n) const;

 private:
  double c_gamma_ = kDefaultCGamma;
  double alpha_ = kDefaultAlpha;
};

double step_size(const StepSchedule& sched, std::uint64_t n);

inline constexpr double kDefaultTruncationRadius = 1e3;
inline constexpr double kDegeneracyTolerance = 1e-12;

inline double truncation_radius_for_scale(double scale) { return 10.0 * scale; }

/// The whole mutable state of the online estimator: the Robbins-Monro iterate
/// Z_n, its running average, and counters.
struct EstimatorState {
  std::uint64_t n = 0;
  Vector z;
  Vector z_bar;
  std::uint64_t skipped = 0;
};

/// Noise of one step. `u` is the negated unit direction -(x - Z_n)/|x - Z_n|
/// whose conditional mean is the gradient at Z_n; `xi` = grad(Z_n) - u is
/// filled in only when a gradient oracle is supplied.
struct MartingaleIncrement {
  Vector u;
  std::optional<Vector> xi;
};

struct StepOutcome {
  bool skipped = false;
  double gamma = 0.0;
  double step_length = 0.0;  // |Z_{n+1} - Z_n|
  std::optional<MartingaleIncrement> increment;  // empty on a skip
};

using GradientOracle = std::function<Vector(const Vector&)>;

// Z_1 = x1 if |x1| <= truncation_radius, else the origin. Throws DataError on
// non-finite coordinates.
EstimatorState init(const Vector& x1, double truncation_radius = kDefaultTruncationRadius);

/// Consumes one observation:
///   Z_{n+1} = Z_n + gamma_n (x - Z_n)/|x - Z_n|
///   Zbar_{n+1} = Zbar_n + (Z_{n+1} - Zbar_n)/(n+1)
/// When |x - Z_n| <= 1e-12 max(1, |x|) the move is skipped (Z_{n+1} = Z_n),
/// `skipped` is incremented and the average is still updated.
StepOutcome update(EstimatorState& state, const Vector& x, const StepSchedule& sched,
                   const GradientOracle* oracle = nullptr);

/// Convenience wrapper that initializes itself from the first observation.
class OnlineMedian {
 public:
  explicit OnlineMedian(StepSchedule sched = {},
                        double truncation_radius = kDefaultTruncationRadius);

  StepOutcome observe(const Vector& x);

  bool empty() const { return state_.n == 0; }
  const EstimatorState& state() const { return state_; }
  const StepSchedule& schedule() const { return sched_; }

 private:
  StepSchedule sched_;
  double truncation_radius_;
  EstimatorState state_;
};

struct Snapshot {
  std::uint64_t n = 0;
  Vector z;
  Vector z_bar;
};

struct StreamResult {
  EstimatorState state;
  std::vector<Snapshot> snapshots;
};

// Throws DataError on an empty stream and ConfigError when checkpoints are
// not strictly ascending inside [1, observations.size()].
StreamResult run_stream(std::span<const Vector> observations, const StepSchedule& sched,
                        std::span<const std::uint64_t> checkpoints,
                        double truncation_radius = kDefaultTruncationRadius);

void validate_checkpoints(std::span<const std::uint64_t> checkpoints, std::uint64_t stream_length);

}  // namespace geomed
