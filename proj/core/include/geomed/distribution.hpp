#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "geomed/vector.hpp"

namespace geomed {

enum class DistributionKind {
  GaussianIsotropic,
  GaussianAnisotropic,
  MixtureContaminated,
  SphereShell,
  DiscretizedProcess,
};

std::string_view to_string(DistributionKind kind);
DistributionKind distribution_kind_from_string(std::string_view name);

/// Parameters of a synthetic data source.
///
/// - gaussian-isotropic: N(center, scale^2 I)
/// - gaussian-anisotropic: independent coordinates with standard deviations
///   spaced linearly from `scale` to `scale * condition`
/// - mixture-contaminated: N(center, scale^2 I) where each draw is replaced,
///   with probability `fraction`, by the point mass center + magnitude * e1
/// - sphere-shell: center + rho * u with u uniform on the unit sphere and
///   rho uniform on [scale * (1 - width), scale * (1 + width)]
/// - discretized-process: center + scale * W(t_j) for a Brownian path W
///   sampled on the grid t_j = (j + 1) / dim
struct DistributionSpec {
  DistributionKind kind = DistributionKind::GaussianIsotropic;
  int dim = 2;
  Vector center;  // empty means the origin
  double scale = 1.0;
  double condition = 10.0;
  double fraction = 0.1;
  double magnitude = 50.0;
  double width = 0.1;
  std::uint64_t seed = 0;

  // Throws ConfigError on an invalid parameter set.
  void validate() const;

  Vector center_or_origin() const;

  // Dimension one cannot satisfy the "not concentrated on a straight line"
  // uniqueness condition.
  bool uniqueness_warning() const { return dim == 1; }

  // The geometric median when it is known in closed form (all kinds that are
  // symmetric about `center`), otherwise empty.
  std::optional<Vector> known_median() const;
};

/// Parses "kind:key=value,key=value". Keys: dim, scale, condition, fraction,
/// magnitude, width, seed, center (a scalar applied to every coordinate).
DistributionSpec parse_distribution_spec(std::string_view text);
std::string format_distribution_spec(const DistributionSpec& spec);

// Seed of substream `index` under `seed`; splitmix64 finalizer over the pair.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// Draws i.i.d. observations from a DistributionSpec. Each instance owns its
/// engine; build one per thread via distinct stream indices.
class Sampler {
 public:
  explicit Sampler(const DistributionSpec& spec, std::uint64_t stream = 0);

  Vector next();
  void fill(std::vector<Vector>& out, std::size_t count);

  const DistributionSpec& spec() const { return spec_; }

 private:
  DistributionSpec spec_;
  Vector center_;
  Vector stddevs_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::vector<Vector> sample(const DistributionSpec& spec, std::size_t count);

}  // namespace geomed
