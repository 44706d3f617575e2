#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "sieve/basis.hpp"

namespace sieve {

/// Fixed design x_i = (i - 1/2)/n with the basis matrix Phi (n x k_max).
///
/// At construction the leading blocks of Phi^T Phi / n are checked for
/// k = 1..k_max; certified_dim() is the largest k whose eigenvalues all lie in
/// [1/c0_limit, c0_limit], and c0() is the smallest C0 that works up to it.
class DesignGrid {
public:
    DesignGrid() = default;
    DesignGrid(int n, BasisKind basis, int k_max, double c0_limit = 2.0);

    int n() const { return static_cast<int>(points_.size()); }
    BasisKind basis() const { return basis_; }
    int k_max() const { return static_cast<int>(phi_.cols()); }
    std::span<const double> points() const { return points_; }

    const Eigen::MatrixXd& basis_matrix() const { return phi_; }
    /// Phi_k^T Phi_k / n, k <= k_max.
    Eigen::MatrixXd gram(int k) const { return gram_.topLeftCorner(k, k); }
    const Eigen::MatrixXd& gram() const { return gram_; }

    int certified_dim() const { return certified_dim_; }
    double c0() const { return c0_; }

private:
    std::vector<double> points_;
    BasisKind basis_ = BasisKind::trigonometric;
    Eigen::MatrixXd phi_;
    Eigen::MatrixXd gram_;
    int certified_dim_ = 0;
    double c0_ = 1.0;
};

std::vector<double> equispaced_design(int n);

}  // namespace sieve
