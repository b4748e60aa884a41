#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "geomed/vector.hpp"

namespace geomed {

/// A finite sample X_1..X_n of uniform dimension. Batch ground truth for the
/// online estimator is computed over one of these.
class SampleSet {
 public:
  // Throws ConfigError when empty or of mixed dimension, DataError on
  // non-finite coordinates.
  explicit SampleSet(std::vector<Vector> points);

  std::size_t count() const { return points_.size(); }
  int dim() const { return static_cast<int>(points_.front().size()); }
  std::span<const Vector> points() const { return points_; }
  const Vector& operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<Vector> points_;
};

/// What to do with sample points at (numerically) zero distance from the
/// evaluation point, where 1/|X_i - h| is undefined.
enum class SingularPolicy {
  Throw,    // SingularPointError
  Exclude,  // drop them from the empirical means and count them
};

// |x - h| <= 1e-12 max(1, |x|); same guard as the online update.
bool coincides(const Vector& x, const Vector& h);

/// Empirical G(h) = mean(|X_i - h| - |X_i|).
double objective(const SampleSet& sample, const Vector& h);

struct GradientEstimate {
  Vector value;
  std::size_t excluded = 0;
};

/// Empirical Phi(h) = -mean((X_i - h)/|X_i - h|). Means are taken over the
/// points that were not excluded.
GradientEstimate gradient(const SampleSet& sample, const Vector& h, SingularPolicy policy);
inline Vector gradient(const SampleSet& sample, const Vector& h) {
  return gradient(sample, h, SingularPolicy::Throw).value;
}

/// Empirical Hessian
///   Gamma_h = mean( (1/r_i) (I - u_i u_i^T) ),  r_i = |X_i - h|, u_i = (X_i - h)/r_i,
/// with its extreme eigenvalues.
struct HessianEstimate {
  Vector center;
  Matrix matrix;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double mean_inverse_distance = 0.0;  // empirical analogue of C in the spectrum bound
  std::size_t excluded = 0;
};

inline constexpr int kDenseEigenMaxDim = 1000;

HessianEstimate hessian(const SampleSet& sample, const Vector& h,
                        SingularPolicy policy = SingularPolicy::Throw);

struct WeiszfeldResult {
  Vector median;
  std::size_t iterations = 0;
  bool converged = false;
  bool anchored = false;         // stopped on a data point via the subgradient test
  double gradient_norm = 0.0;    // minimal-norm subgradient at `median`
  std::vector<double> objective_trace;  // objective at every iterate, starting point first
};

/// Weiszfeld fixed-point iteration with the Vardi-Zhang modification for
/// iterates that land on data points. Starts at the coordinate-wise mean.
/// Stops when the minimal-norm subgradient max(0, |R| - eta)/n <= tol, with R
/// the sum of unit vectors toward non-coincident points and eta the
/// multiplicity of the current iterate in the sample. On max_iter the best
/// iterate is returned with converged = false.
WeiszfeldResult weiszfeld(const SampleSet& sample, double tol = 1e-10, std::size_t max_iter = 100000);

struct PowerIterationResult {
  double eigenvalue = 0.0;
  Vector eigenvector;
  std::size_t iterations = 0;
};

/// Largest eigenvalue of a symmetric positive semidefinite matrix. Stops when
/// the residual |Bv - mu v| <= rel_tol * mu. Throws NumericalError when
/// max_iter is reached first.
PowerIterationResult power_iteration(const Matrix& matrix, double rel_tol = 1e-10,
                                     std::size_t max_iter = 1000000);

/// Streaming accumulator for the quantities behind
///   lambda_min = mean(1/r_i) - lambda_max( mean((X_i - c)(X_i - c)^T / r_i^3) ).
/// Needs O(d^2) memory and one pass over the data.
class CurvatureMoments {
 public:
  CurvatureMoments(Vector center, SingularPolicy policy);

  void add(const Vector& x);

  std::size_t used() const { return used_; }
  std::size_t excluded() const { return excluded_; }
  const Vector& center() const { return center_; }

  double mean_inverse_distance() const;
  Matrix weighted_second_moment() const;
  // Throws NumericalError when no point was usable.
  double lambda_min() const;

 private:
  Vector center_;
  SingularPolicy policy_;
  double inv_sum_ = 0.0;
  Matrix outer_sum_;
  std::size_t used_ = 0;
  std::size_t excluded_ = 0;
};

double lambda_min_estimate(const SampleSet& sample, const Vector& center,
                           SingularPolicy policy = SingularPolicy::Throw);

struct LinearizationCheck {
  double residual_norm = 0.0;  // |Phi(h) - Gamma_mhat (h - mhat)|
  double bound = 0.0;          // 6 C_hat |h - mhat|^2, C_hat = mean(1/|X_i - mhat|^2)
};

LinearizationCheck linearization_residual(const SampleSet& sample, const Vector& m_hat,
                                          const Vector& h);

}  // namespace geomed
