#include "geomed/distribution.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "geomed/errors.hpp"

namespace geomed {

namespace {

struct KindName {
  DistributionKind kind;
  std::string_view name;
};

constexpr KindName kKindNames[] = {
    {DistributionKind::GaussianIsotropic, "gaussian-isotropic"},
    {DistributionKind::GaussianAnisotropic, "gaussian-anisotropic"},
    {DistributionKind::MixtureContaminated, "mixture-contaminated"},
    {DistributionKind::SphereShell, "sphere-shell"},
    {DistributionKind::DiscretizedProcess, "discretized-process"},
};

double parse_double(std::string_view key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("distribution spec: invalid value for '" + std::string(key) + "': '" +
                      std::string(text) + "'");
  }
  return value;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("distribution spec: invalid integer for '" + std::string(key) + "': '" +
                      std::string(text) + "'");
  }
  return value;
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string_view to_string(DistributionKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

DistributionKind distribution_kind_from_string(std::string_view name) {
  for (const auto& k : kKindNames) {
    if (k.name == name) return k.kind;
  }
  throw ConfigError("unknown distribution kind '" + std::string(name) + "'");
}

void DistributionSpec::validate() const {
  if (dim < 1) throw ConfigError("distribution: dim must be >= 1");
  if (center.size() != 0 && center.size() != dim) {
    throw ConfigError("distribution: center has dimension " + std::to_string(center.size()) +
                      ", expected " + std::to_string(dim));
  }
  if (center.size() != 0 && !center.allFinite()) {
    throw ConfigError("distribution: center must be finite");
  }
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("distribution: scale must be > 0");
  if (kind == DistributionKind::GaussianAnisotropic && (!(condition > 0.0) || !std::isfinite(condition))) {
    throw ConfigError("distribution: condition must be > 0");
  }
  if (kind == DistributionKind::MixtureContaminated) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
      throw ConfigError("distribution: contamination fraction must lie in [0, 1)");
    }
    if (!std::isfinite(magnitude)) throw ConfigError("distribution: magnitude must be finite");
  }
  if (kind == DistributionKind::SphereShell && !(width >= 0.0 && width < 1.0)) {
    throw ConfigError("distribution: shell width must lie in [0, 1)");
  }
}

Vector DistributionSpec::center_or_origin() const {
  return center.size() == 0 ? Vector(Vector::Zero(dim)) : center;
}

std::optional<Vector> DistributionSpec::known_median() const {
  if (kind == DistributionKind::MixtureContaminated && fraction > 0.0) return std::nullopt;
  return center_or_origin();
}

DistributionSpec parse_distribution_spec(std::string_view text) {
  DistributionSpec spec;
  const auto colon = text.find(':');
  spec.kind = distribution_kind_from_string(text.substr(0, colon));
  if (colon == std::string_view::npos) {
    spec.validate();
    return spec;
  }
  std::string_view rest = text.substr(colon + 1);
  std::optional<double> center_value;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("distribution spec: expected key=value, got '" + std::string(item) + "'");
    }
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "dim") {
      spec.dim = static_cast<int>(parse_u64(key, value));
    } else if (key == "scale") {
      spec.scale = parse_double(key, value);
    } else if (key == "condition") {
      spec.condition = parse_double(key, value);
    } else if (key == "fraction") {
      spec.fraction = parse_double(key, value);
    } else if (key == "magnitude") {
      spec.magnitude = parse_double(key, value);
    } else if (key == "width") {
      spec.width = parse_double(key, value);
    } else if (key == "seed") {
      spec.seed = parse_u64(key, value);
    } else if (key == "center") {
      center_value = parse_double(key, value);
    } else {
      throw ConfigError("distribution spec: unknown key '" + std::string(key) + "'");
    }
  }
  if (center_value) spec.center = Vector::Constant(spec.dim, *center_value);
  spec.validate();
  return spec;
}

std::string format_distribution_spec(const DistributionSpec& spec) {
  std::string out(to_string(spec.kind));
  out += ":dim=" + std::to_string(spec.dim);
  out += ",scale=" + g17(spec.scale);
  switch (spec.kind) {
    case DistributionKind::GaussianAnisotropic:
      out += ",condition=" + g17(spec.condition);
      break;
    case DistributionKind::MixtureContaminated:
      out += ",fraction=" + g17(spec.fraction) + ",magnitude=" + g17(spec.magnitude);
      break;
    case DistributionKind::SphereShell:
      out += ",width=" + g17(spec.width);
      break;
    default:
      break;
  }
  if (spec.center.size() != 0) {
    // Only constant centers have a textual form.
    out += ",center=" + g17(spec.center[0]);
  }
  out += ",seed=" + std::to_string(spec.seed);
  return out;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (index * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

Sampler::Sampler(const DistributionSpec& spec, std::uint64_t stream)
    : spec_(spec), engine_(substream_seed(spec.seed, stream)) {
  spec_.validate();
  center_ = spec_.center_or_origin();
  stddevs_ = Vector::Constant(spec_.dim, spec_.scale);
  if (spec_.kind == DistributionKind::GaussianAnisotropic && spec_.dim > 1) {
    for (int j = 0; j < spec_.dim; ++j) {
      const double t = static_cast<double>(j) / (spec_.dim - 1);
      stddevs_[j] = spec_.scale * (1.0 + t * (spec_.condition - 1.0));
    }
  }
}

Vector Sampler::next() {
  const int d = spec_.dim;
  Vector x(d);
  switch (spec_.kind) {
    case DistributionKind::GaussianIsotropic:
    case DistributionKind::GaussianAnisotropic:
      for (int j = 0; j < d; ++j) x[j] = center_[j] + stddevs_[j] * normal_(engine_);
      return x;
    case DistributionKind::MixtureContaminated: {
      for (int j = 0; j < d; ++j) x[j] = center_[j] + spec_.scale * normal_(engine_);
      // No Bernoulli draw at fraction 0 so the stream equals the clean one.
      if (spec_.fraction > 0.0 && uniform_(engine_) < spec_.fraction) {
        x = center_;
        x[0] += spec_.magnitude;
      }
      return x;
    }
    case DistributionKind::SphereShell: {
      double r2 = 0.0;
      do {
        for (int j = 0; j < d; ++j) x[j] = normal_(engine_);
        r2 = x.squaredNorm();
      } while (r2 == 0.0);
      const double rho = spec_.scale * (1.0 + spec_.width * (2.0 * uniform_(engine_) - 1.0));
      return center_ + (rho / std::sqrt(r2)) * x;
    }
    case DistributionKind::DiscretizedProcess: {
      const double step_sd = spec_.scale / std::sqrt(static_cast<double>(d));
      double w = 0.0;
      for (int j = 0; j < d; ++j) {
        w += step_sd * normal_(engine_);
        x[j] = center_[j] + w;
      }
      return x;
    }
  }
  return x;
}

void Sampler::fill(std::vector<Vector>& out, std::size_t count) {
  out.reserve(out.size() + count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(next());
}

std::vector<Vector> sample(const DistributionSpec& spec, std::size_t count) {
  if (count < 1) throw ConfigError("sample: count must be >= 1");
  Sampler sampler(spec);
  std::vector<Vector> out;
  sampler.fill(out, count);
  return out;
}

}  // namespace geomed
