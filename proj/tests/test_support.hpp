#pragma once

#include <Eigen/QR>

#include <cstdint>
#include <random>
#include <vector>

#include "geomed/geometry_oracle.hpp"
#include "geomed/vector.hpp"

namespace geomed::testing {

inline Vector random_vector(std::mt19937_64& rng, int dim, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = normal(rng);
  return v;
}

inline Vector random_unit(std::mt19937_64& rng, int dim) { return random_vector(rng, dim).normalized(); }

// Uniform in the unit ball around `center`.
inline Vector random_in_ball(std::mt19937_64& rng, const Vector& center, double radius = 1.0) {
  std::uniform_real_distribution<double> uniform;
  const auto d = static_cast<int>(center.size());
  return center + radius * std::pow(uniform(rng), 1.0 / d) * random_unit(rng, d);
}

inline std::vector<Vector> gaussian_points(std::mt19937_64& rng, std::size_t count, int dim,
                                           double scale = 1.0) {
  std::vector<Vector> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) pts.push_back(random_vector(rng, dim, scale));
  return pts;
}

inline Matrix random_orthogonal(std::mt19937_64& rng, int dim) {
  Matrix a(dim, dim);
  std::normal_distribution<double> normal;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

// Arithmetic mean computed from scratch, independent of any recursion.
inline Vector batch_mean(const std::vector<Vector>& pts) {
  Vector m = Vector::Zero(pts.front().size());
  for (const auto& p : pts) m += p;
  return m / static_cast<double>(pts.size());
}

inline std::vector<Vector> symmetric_cross() {
  return {make_vector({1, 0}), make_vector({-1, 0}), make_vector({0, 1}), make_vector({0, -1})};
}

}  // namespace geomed::testing
