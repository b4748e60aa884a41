#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>

namespace geomed {

// A point of the finite-dimensional proxy of the Hilbert space. Functional
// data are carried as fixed-grid discretizations.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

Vector make_vector(std::initializer_list<double> coords);
Vector make_vector(std::span<const double> coords);

// Throws ConfigError when the dimensions differ. `what` names the call site.
void require_same_dim(const Vector& a, const Vector& b, std::string_view what);

bool all_finite(const Vector& a);

double inner(const Vector& a, const Vector& b);
double norm(const Vector& a);
double distance(const Vector& a, const Vector& b);

}  // namespace geomed
