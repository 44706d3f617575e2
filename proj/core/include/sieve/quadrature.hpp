#pragma once

#include <span>
#include <vector>

namespace sieve {

/// Nodes and weights on [0,1]. Rules are composite Gauss-Legendre.
class QuadratureRule {
public:
    QuadratureRule() = default;

    /// 512-node default: 64 equal panels of order 8.
    static QuadratureRule standard();

    /// Equal panels on [0,1].
    static QuadratureRule uniform(int panels, int order);

    /// One panel per interval between consecutive breakpoints; panels wider
    /// than max_width are split evenly. Piecewise-constant functions whose
    /// jumps lie on the breakpoints integrate exactly.
    static QuadratureRule from_breakpoints(std::vector<double> breakpoints, int order,
                                           double max_width = 1.0 / 64.0);

    /// Breakpoints {j/k : 1 <= k <= k_max}; exact for histograms with at most k_max bins.
    static QuadratureRule histogram_aligned(int k_max, int order = 6);

    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    std::size_t size() const { return nodes_.size(); }

    template <class F>
    double integrate(F&& f) const {
        double total = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) total += weights_[i] * f(nodes_[i]);
        return total;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on P_n.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace sieve
