#pragma once

#include <functional>

#include <Eigen/Dense>

namespace sieve {

struct NewtonOptions {
    double gradient_tolerance = 1e-9;  // relative to max(1, |objective|)
    int max_iterations = 200;
};

struct NewtonResult {
    Eigen::VectorXd x;
    double value;          // objective at x
    Eigen::MatrixXd hessian;
    double gradient_norm;
    int iterations;
};

/// Objective returning f(x); fills gradient and Hessian when the pointers are
/// non-null (line searches pass null).
using ConvexObjective =
    std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*, Eigen::MatrixXd*)>;

/// Damped Newton with backtracking for a smooth strictly convex objective. Stops
/// on the gradient tolerance or when the Newton decrement reaches rounding level.
/// Throws ConvergenceError when the tolerance is not reached.
NewtonResult minimize_newton(const ConvexObjective& objective, Eigen::VectorXd start,
                             const NewtonOptions& options = {});

}  // namespace sieve
