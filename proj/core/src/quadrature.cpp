#include "sieve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "sieve/error.hpp"

namespace sieve {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 1) throw InvalidArgument("Gauss-Legendre order must be >= 1");
    nodes.assign(order, 0.0);
    weights.assign(order, 0.0);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double pp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= order; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = order * (z * p1 - p2) / (z * z - 1.0);
            const double previous = z;
            z = previous - p1 / pp;
            if (std::abs(z - previous) < 1e-15) break;
        }
        nodes[i] = -z;
        nodes[order - 1 - i] = z;
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
}

QuadratureRule QuadratureRule::standard() { return uniform(64, 8); }

QuadratureRule QuadratureRule::uniform(int panels, int order) {
    if (panels < 1) throw InvalidArgument("quadrature needs at least one panel");
    std::vector<double> breaks(panels + 1);
    for (int i = 0; i <= panels; ++i) breaks[i] = static_cast<double>(i) / panels;
    return from_breakpoints(std::move(breaks), order, 1.0);
}

QuadratureRule QuadratureRule::from_breakpoints(std::vector<double> breakpoints, int order,
                                                double max_width) {
    breakpoints.push_back(0.0);
    breakpoints.push_back(1.0);
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end(),
                                  [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                      breakpoints.end());
    if (breakpoints.front() < 0.0 || breakpoints.back() > 1.0)
        throw InvalidArgument("quadrature breakpoints must lie in [0,1]");

    std::vector<double> ref_nodes, ref_weights;
    gauss_legendre(order, ref_nodes, ref_weights);

    QuadratureRule rule;
    for (std::size_t p = 0; p + 1 < breakpoints.size(); ++p) {
        const double a = breakpoints[p];
        const double b = breakpoints[p + 1];
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width - 1e-9)));
        const double h = (b - a) / pieces;
        for (int s = 0; s < pieces; ++s) {
            const double lo = a + s * h;
            for (int i = 0; i < order; ++i) {
                rule.nodes_.push_back(lo + 0.5 * h * (ref_nodes[i] + 1.0));
                rule.weights_.push_back(0.5 * h * ref_weights[i]);
            }
        }
    }
    return rule;
}

QuadratureRule QuadratureRule::histogram_aligned(int k_max, int order) {
    if (k_max < 1) throw InvalidArgument("histogram_aligned needs k_max >= 1");
    std::vector<double> breaks;
    for (int k = 1; k <= k_max; ++k)
        for (int j = 1; j < k; ++j) breaks.push_back(static_cast<double>(j) / k);
    return from_breakpoints(std::move(breaks), order);
}

}  // namespace sieve
