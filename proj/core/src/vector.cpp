#include "geomed/vector.hpp"

#include <cmath>
#include <string>

#include "geomed/errors.hpp"

namespace geomed {

Vector make_vector(std::initializer_list<double> coords) {
  Vector v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) v[i++] = c;
  return v;
}

Vector make_vector(std::span<const double> coords) {
  Vector v(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) v[static_cast<Eigen::Index>(i)] = coords[i];
  return v;
}

void require_same_dim(const Vector& a, const Vector& b, std::string_view what) {
  if (a.size() != b.size()) {
    throw ConfigError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + ")");
  }
}

bool all_finite(const Vector& a) { return a.allFinite(); }

double inner(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "inner");
  return a.dot(b);
}

double norm(const Vector& a) { return a.norm(); }

double distance(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "distance");
  return (a - b).norm();
}

}  // namespace geomed
