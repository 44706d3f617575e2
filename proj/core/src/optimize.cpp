#include "sieve/optimize.hpp"

#include <cmath>

#include "sieve/error.hpp"

namespace sieve {

NewtonResult minimize_newton(const ConvexObjective& objective, Eigen::VectorXd start,
                             const NewtonOptions& options) {
    const Eigen::Index k = start.size();
    Eigen::VectorXd x = std::move(start);
    Eigen::VectorXd grad(k);
    Eigen::MatrixXd hess(k, k);
    double f = objective(x, &grad, &hess);
    if (!std::isfinite(f)) throw ConvergenceError("Newton start point has non-finite objective", NAN);

    for (int it = 0; it <= options.max_iterations; ++it) {
        const double gnorm = grad.norm();
        if (gnorm <= options.gradient_tolerance * std::max(1.0, std::abs(f)))
            return {x, f, hess, gnorm, it};
        if (it == options.max_iterations) break;

        // Newton direction; shift the Hessian if it is not numerically positive definite.
        Eigen::VectorXd dir;
        double shift = 0.0;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::MatrixXd h = hess;
            if (shift > 0.0) h.diagonal().array() += shift;
            Eigen::LLT<Eigen::MatrixXd> llt(h);
            if (llt.info() == Eigen::Success) {
                dir = llt.solve(-grad);
                break;
            }
            shift = shift == 0.0 ? 1e-10 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff()) : shift * 10.0;
        }
        if (dir.size() != k) throw ConvergenceError("Newton Hessian could not be regularized", gnorm);

        const double slope = grad.dot(dir);
        // Newton decrement: the remaining decrease is -slope / 2; stop once it
        // is at rounding level relative to f.
        if (-slope <= 1e-14 * std::max(1.0, std::abs(f))) return {x, f, hess, gnorm, it};
        double t = 1.0;
        Eigen::VectorXd trial;
        double f_trial = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            trial = x + t * dir;
            f_trial = objective(trial, nullptr, nullptr);
            if (std::isfinite(f_trial) && f_trial <= f + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            // No decrease is representable: accept if already at rounding level.
            if (gnorm <= 1e3 * options.gradient_tolerance * std::max(1.0, std::abs(f)))
                return {x, f, hess, gnorm, it};
            throw ConvergenceError("Newton line search failed", gnorm);
        }
        x = std::move(trial);
        f = objective(x, &grad, &hess);
    }
    throw ConvergenceError("Newton iteration limit reached", grad.norm());
}

}  // namespace sieve
