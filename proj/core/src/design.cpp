#include "sieve/design.hpp"

#include <algorithm>

#include "sieve/error.hpp"

namespace sieve {

std::vector<double> equispaced_design(int n) {
    std::vector<double> x(std::max(n, 0));
    for (int i = 0; i < n; ++i) x[i] = (i + 0.5) / n;
    return x;
}

DesignGrid::DesignGrid(int n, BasisKind basis, int k_max, double c0_limit)
    : points_(equispaced_design(n)), basis_(basis) {
    if (n < 1) throw InvalidArgument("design needs n >= 1");
    if (k_max < 1) throw InvalidArgument("design needs k_max >= 1");
    if (c0_limit < 1.0) throw InvalidArgument("design C0 limit must be >= 1");

    phi_.resize(n, k_max);
    std::vector<double> row(k_max);
    for (int i = 0; i < n; ++i) {
        basis_values(basis, points_[i], row);
        for (int j = 0; j < k_max; ++j) phi_(i, j) = row[j];
    }
    gram_ = (phi_.transpose() * phi_) / static_cast<double>(n);

    // Leading blocks; eigenvalues interlace, so stop at the first failure.
    certified_dim_ = 0;
    c0_ = 1.0;
    for (int k = 1; k <= k_max; ++k) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_.topLeftCorner(k, k),
                                                           Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo <= 0.0) break;
        const double c0 = std::max(hi, 1.0 / lo);
        if (c0 > c0_limit) break;
        certified_dim_ = k;
        c0_ = std::max(c0_, c0);
    }
}

}  // namespace sieve
