#include "geomed/geometry_oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "geomed/errors.hpp"

namespace geomed {

namespace {

void require_dim(const SampleSet& sample, const Vector& h, const char* what) {
  if (h.size() != sample.dim()) {
    throw ConfigError(std::string(what) + ": dimension mismatch (" + std::to_string(h.size()) +
                      " vs sample dim " + std::to_string(sample.dim()) + ")");
  }
}

[[noreturn]] void throw_singular(const char* what, std::size_t index) {
  throw SingularPointError(std::string(what) + ": evaluation point coincides with sample point " +
                           std::to_string(index));
}

}  // namespace

SampleSet::SampleSet(std::vector<Vector> points) : points_(std::move(points)) {
  if (points_.empty()) throw ConfigError("sample set: count must be >= 1");
  const auto d = points_.front().size();
  if (d < 1) throw ConfigError("sample set: dim must be >= 1");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].size() != d) {
      throw ConfigError("sample set: point " + std::to_string(i) + " has dimension " +
                        std::to_string(points_[i].size()) + ", expected " + std::to_string(d));
    }
    if (!points_[i].allFinite()) {
      throw DataError("sample set: point " + std::to_string(i) + " has non-finite coordinates");
    }
  }
}

bool coincides(const Vector& x, const Vector& h) {
  return (x - h).norm() <= 1e-12 * std::max(1.0, x.norm());
}

double objective(const SampleSet& sample, const Vector& h) {
  require_dim(sample, h, "objective");
  // |x - h| - |x| = (|h|^2 - 2<x, h>) / (|x - h| + |x|) avoids cancellation,
  // and Neumaier summation keeps the small mean accurate.
  const double hh = h.squaredNorm();
  double sum = 0.0, comp = 0.0;
  for (const auto& x : sample.points()) {
    const double denom = (x - h).norm() + x.norm();
    const double term = denom > 0.0 ? (hh - 2.0 * x.dot(h)) / denom : 0.0;
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return (sum + comp) / static_cast<double>(sample.count());
}

GradientEstimate gradient(const SampleSet& sample, const Vector& h, SingularPolicy policy) {
  require_dim(sample, h, "gradient");
  GradientEstimate out{Vector::Zero(sample.dim()), 0};
  for (std::size_t i = 0; i < sample.count(); ++i) {
    const Vector diff = sample[i] - h;
    const double r = diff.norm();
    if (r <= 1e-12 * std::max(1.0, sample[i].norm())) {
      if (policy == SingularPolicy::Throw) throw_singular("gradient", i);
      ++out.excluded;
      continue;
    }
    out.value -= diff / r;
  }
  const auto used = sample.count() - out.excluded;
  if (used == 0) throw SingularPointError("gradient: every sample point coincides with h");
  out.value /= static_cast<double>(used);
  return out;
}

HessianEstimate hessian(const SampleSet& sample, const Vector& h, SingularPolicy policy) {
  require_dim(sample, h, "hessian");
  const int d = sample.dim();
  HessianEstimate est;
  est.center = h;
  est.matrix = Matrix::Zero(d, d);
  double inv_sum = 0.0;
  for (std::size_t i = 0; i < sample.count(); ++i) {
    const Vector diff = sample[i] - h;
    const double r = diff.norm();
    if (r <= 1e-12 * std::max(1.0, sample[i].norm())) {
      if (policy == SingularPolicy::Throw) throw_singular("hessian", i);
      ++est.excluded;
      continue;
    }
    const double inv_r = 1.0 / r;
    inv_sum += inv_r;
    est.matrix.diagonal().array() += inv_r;
    est.matrix.noalias() -= (inv_r * inv_r * inv_r) * diff * diff.transpose();
  }
  const auto used = sample.count() - est.excluded;
  if (used == 0) throw SingularPointError("hessian: every sample point coincides with h");
  est.matrix /= static_cast<double>(used);
  // Symmetrize away rounding from the rank-one updates.
  est.matrix = 0.5 * (est.matrix + est.matrix.transpose()).eval();
  est.mean_inverse_distance = inv_sum / static_cast<double>(used);

  if (d <= kDenseEigenMaxDim) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(est.matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("hessian: eigensolver failed");
    est.lambda_min = solver.eigenvalues()(0);
    est.lambda_max = solver.eigenvalues()(d - 1);
  } else {
    est.lambda_max = power_iteration(est.matrix).eigenvalue;
    // Smallest eigenvalue through the top of the reflected spectrum.
    const Matrix reflected = est.lambda_max * Matrix::Identity(d, d) - est.matrix;
    est.lambda_min = est.lambda_max - power_iteration(reflected).eigenvalue;
  }
  return est;
}

WeiszfeldResult weiszfeld(const SampleSet& sample, double tol, std::size_t max_iter) {
  if (!(tol > 0.0)) throw ConfigError("weiszfeld: tol must be > 0");
  const auto n = sample.count();
  const double inv_n = 1.0 / static_cast<double>(n);
  const int d = sample.dim();

  Vector y = Vector::Zero(d);
  for (const auto& x : sample.points()) y += x;
  y *= inv_n;

  WeiszfeldResult result;
  Vector best = y;
  double best_obj = std::numeric_limits<double>::infinity();
  double best_grad = std::numeric_limits<double>::infinity();

  Vector weighted(d);
  Vector resultant(d);
  for (std::size_t iter = 0;; ++iter) {
    weighted.setZero();
    resultant.setZero();
    double weight_sum = 0.0;
    std::size_t eta = 0;
    for (const auto& x : sample.points()) {
      const Vector diff = x - y;
      const double r = diff.norm();
      if (r <= 1e-12 * std::max(1.0, x.norm())) {
        ++eta;
        continue;
      }
      const double w = 1.0 / r;
      weight_sum += w;
      weighted.noalias() += w * x;
      resultant.noalias() += w * diff;
    }
    const double obj = objective(sample, y);
    result.objective_trace.push_back(obj);
    const double rnorm = resultant.norm();
    const double grad = std::max(0.0, rnorm - static_cast<double>(eta)) * inv_n;
    if (obj <= best_obj) {
      best_obj = obj;
      best = y;
      best_grad = grad;
    }
    result.iterations = iter;
    if (grad <= tol || eta == n) {
      result.median = y;
      result.converged = true;
      result.anchored = eta > 0;
      result.gradient_norm = grad;
      return result;
    }
    if (iter >= max_iter) break;

    const Vector target = weighted / weight_sum;
    if (eta == 0) {
      y = target;
    } else {
      const double beta = std::min(1.0, static_cast<double>(eta) / rnorm);
      y = (1.0 - beta) * target + beta * y;
    }
  }
  result.median = best;
  result.converged = false;
  result.gradient_norm = best_grad;
  return result;
}

PowerIterationResult power_iteration(const Matrix& matrix, double rel_tol, std::size_t max_iter) {
  const auto d = matrix.rows();
  if (d != matrix.cols() || d < 1) throw ConfigError("power iteration: matrix must be square");
  std::mt19937_64 engine(0x5eedULL);
  std::normal_distribution<double> normal;
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = 1.0 + 0.5 * normal(engine);
  v.normalize();

  PowerIterationResult out;
  Vector w(d);
  for (std::size_t it = 1; it <= max_iter; ++it) {
    w.noalias() = matrix * v;
    const double mu = v.dot(w);
    const double residual = (w - mu * v).norm();
    out.iterations = it;
    if (residual <= rel_tol * std::abs(mu) || w.norm() == 0.0) {
      out.eigenvalue = mu;
      out.eigenvector = v;
      return out;
    }
    v = w / w.norm();
  }
  throw NumericalError("power iteration: no convergence after " + std::to_string(max_iter) +
                       " iterations");
}

CurvatureMoments::CurvatureMoments(Vector center, SingularPolicy policy)
    : center_(std::move(center)), policy_(policy) {
  if (center_.size() < 1) throw ConfigError("curvature moments: empty center");
  if (!center_.allFinite()) throw DataError("curvature moments: non-finite center");
  outer_sum_ = Matrix::Zero(center_.size(), center_.size());
}

void CurvatureMoments::add(const Vector& x) {
  require_same_dim(center_, x, "curvature moments");
  const Vector diff = x - center_;
  const double r = diff.norm();
  if (r <= 1e-12 * std::max(1.0, x.norm())) {
    if (policy_ == SingularPolicy::Throw) throw_singular("lambda_min", used_ + excluded_);
    ++excluded_;
    return;
  }
  const double inv_r = 1.0 / r;
  inv_sum_ += inv_r;
  outer_sum_.noalias() += (inv_r * inv_r * inv_r) * diff * diff.transpose();
  ++used_;
}

double CurvatureMoments::mean_inverse_distance() const {
  if (used_ == 0) throw NumericalError("curvature moments: no usable points");
  return inv_sum_ / static_cast<double>(used_);
}

Matrix CurvatureMoments::weighted_second_moment() const {
  if (used_ == 0) throw NumericalError("curvature moments: no usable points");
  Matrix b = outer_sum_ / static_cast<double>(used_);
  return 0.5 * (b + b.transpose());
}

double CurvatureMoments::lambda_min() const {
  return mean_inverse_distance() - power_iteration(weighted_second_moment()).eigenvalue;
}

double lambda_min_estimate(const SampleSet& sample, const Vector& center, SingularPolicy policy) {
  require_dim(sample, center, "lambda_min_estimate");
  CurvatureMoments moments(center, policy);
  for (const auto& x : sample.points()) moments.add(x);
  return moments.lambda_min();
}

LinearizationCheck linearization_residual(const SampleSet& sample, const Vector& m_hat,
                                          const Vector& h) {
  require_dim(sample, m_hat, "linearization_residual");
  require_dim(sample, h, "linearization_residual");
  const Vector grad = gradient(sample, h);
  const HessianEstimate hess = hessian(sample, m_hat);
  double inv_sq_sum = 0.0;
  for (const auto& x : sample.points()) inv_sq_sum += 1.0 / (x - m_hat).squaredNorm();
  const double c_hat = inv_sq_sum / static_cast<double>(sample.count());
  const Vector disp = h - m_hat;
  LinearizationCheck out;
  out.residual_norm = (grad - hess.matrix * disp).norm();
  out.bound = 6.0 * c_hat * disp.squaredNorm();
  return out;
}

}  // namespace geomed
