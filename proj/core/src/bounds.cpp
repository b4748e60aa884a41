#include "geomed/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geomed/errors.hpp"

namespace geomed {

namespace {

void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
}

}  // namespace

std::string_view to_string(BallMethod method) {
  return method == BallMethod::Averaged ? "averaged" : "robbins-monro";
}

double averaged_radius(std::uint64_t n, double delta, double lambda_min) {
  if (n == 0) throw ConfigError("averaged_radius: n must be >= 1");
  require_delta(delta);
  if (!(lambda_min > 0.0)) {
    throw NumericalError("averaged_radius: lambda_min must be > 0 (ball undefined)");
  }
  const double nd = static_cast<double>(n);
  return (4.0 / lambda_min) * (2.0 / (3.0 * nd) + 1.0 / std::sqrt(nd)) * std::log(4.0 / delta);
}

double rm_radius_shape(std::uint64_t n, double delta, double alpha, double scale_c) {
  if (n == 0) throw ConfigError("rm_radius_shape: n must be >= 1");
  require_delta(delta);
  if (!(scale_c > 0.0)) throw ConfigError("rm_radius_shape: scale_c must be > 0");
  return scale_c * std::pow(static_cast<double>(n), -alpha / 2.0) * std::log(4.0 / delta);
}

double n_delta_real(double delta, double alpha, const ValidityRankConstants& c) {
  require_delta(delta);
  if (!(alpha > 0.5 && alpha < 1.0)) throw ConfigError("n_delta: alpha must lie in (1/2, 1)");
  if (!(c.c1 > 0.0 && c.c2 > 0.0 && c.c3 > 0.0)) {
    throw ConfigError("n_delta: constants must be > 0");
  }
  const double q = delta * std::log(4.0 / delta);
  const double t1 = std::pow(6.0 * c.c1 / q, 1.0 / (0.5 - alpha / 2.0));
  const double t2 = std::pow(6.0 * c.c2 / q, 1.0 / (alpha - 0.5));
  const double t3 = std::pow(6.0 * c.c3 / q, 0.5);
  return std::max({t1, t2, t3});
}

std::uint64_t n_delta(double delta, double alpha, const ValidityRankConstants& c) {
  const double v = std::ceil(n_delta_real(delta, alpha, c));
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  if (!(v < static_cast<double>(kMax))) return kMax;
  return static_cast<std::uint64_t>(v);
}

void BernsteinParams::validate() const {
  if (!(sigma_sq >= 0.0) || !(big_n >= 0.0) || !(t > 0.0)) {
    throw ConfigError("bernstein: need sigma_sq >= 0, big_n >= 0, t > 0");
  }
}

double bernstein_tail(const BernsteinParams& p) {
  p.validate();
  const double denom = 2.0 * (p.sigma_sq + p.t * p.big_n / 3.0);
  if (denom == 0.0) return 0.0;
  return 2.0 * std::exp(-p.t * p.t / denom);
}

double tail_inversion(double target_delta, double sigma_sq, double big_n) {
  require_delta(target_delta);
  if (!(sigma_sq >= 0.0) || !(big_n >= 0.0)) {
    throw ConfigError("tail_inversion: need sigma_sq >= 0, big_n >= 0");
  }
  return 4.0 * (big_n / 3.0 + std::sqrt(sigma_sq)) * std::log(4.0 / target_delta);
}

ConfidenceBall make_averaged_ball(const Vector& center, std::uint64_t n, double delta,
                                  double lambda_min, double alpha,
                                  const ValidityRankConstants& c) {
  ConfidenceBall ball;
  ball.center = center;
  ball.radius = averaged_radius(n, delta, lambda_min);
  ball.delta = delta;
  ball.method = BallMethod::Averaged;
  ball.lambda_min_used = lambda_min;
  ball.n = n;
  ball.n_delta = n_delta(delta, alpha, c);
  ball.below_validity_rank = n < *ball.n_delta;
  return ball;
}

}  // namespace geomed
