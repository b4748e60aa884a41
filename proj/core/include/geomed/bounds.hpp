#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "geomed/vector.hpp"

namespace geomed {

enum class BallMethod { Averaged, RobbinsMonro };

std::string_view to_string(BallMethod method);

/// Non-asymptotic confidence ball around an online estimate.
struct ConfidenceBall {
  Vector center;
  double radius = 0.0;
  double delta = 0.05;
  BallMethod method = BallMethod::Averaged;
  std::optional<double> lambda_min_used;  // averaged method only
  std::uint64_t n = 0;
  std::optional<std::uint64_t> n_delta;   // rank from which the guarantee holds
  bool below_validity_rank = false;
};

/// Averaged-iterate ball radius (4/lambda_min) (2/(3n) + 1/sqrt(n)) ln(4/delta).
/// Throws NumericalError for lambda_min <= 0 and ConfigError for n == 0 or
/// delta outside (0, 1).
double averaged_radius(std::uint64_t n, double delta, double lambda_min);

/// Shape of the Robbins-Monro ball, scale_c n^(-alpha/2) ln(4/delta). The
/// constant is existential in theory; calibrate it with
/// calibrate_rm_constant().
double rm_radius_shape(std::uint64_t n, double delta, double alpha, double scale_c);

struct ValidityRankConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
};

/// ceil(max{ (6 c1 / q)^(1/(1/2 - alpha/2)), (6 c2 / q)^(1/(alpha - 1/2)), (6 c3 / q)^(1/2) })
/// with q = delta ln(4/delta). Saturates at UINT64_MAX.
std::uint64_t n_delta(double delta, double alpha, const ValidityRankConstants& c = {});

/// Same quantity before the ceiling, for callers that need the magnitude
/// beyond the integer range.
double n_delta_real(double delta, double alpha, const ValidityRankConstants& c = {});

struct BernsteinParams {
  double sigma_sq = 0.0;  // variance proxy
  double big_n = 0.0;     // almost-sure magnitude bound of each increment
  double t = 1.0;         // deviation level

  void validate() const;
};

/// 2 exp(-t^2 / (2 (sigma^2 + t N / 3))). Returns 0 when sigma^2 = N = 0, the
/// sum then being identically zero.
double bernstein_tail(const BernsteinParams& p);

/// t* = 4 (N/3 + sigma) ln(4/delta). bernstein_tail at t* is <= delta/2.
double tail_inversion(double target_delta, double sigma_sq, double big_n);

/// Averaged ball at (center, n) with validity-rank flagging. Throws
/// NumericalError when lambda_min <= 0.
ConfidenceBall make_averaged_ball(const Vector& center, std::uint64_t n, double delta,
                                  double lambda_min, double alpha,
                                  const ValidityRankConstants& c = {});

}  // namespace geomed
