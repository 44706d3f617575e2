#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

#include "sieve/quadrature.hpp"

namespace sieve {

enum class MetricKind { empirical_l2, hellinger, empirical_hellinger, l2 };

std::string to_string(MetricKind kind);

/// An element embedded in a metric's coordinate space.
///   empirical_l2         basis coefficients; residual_sq carries the squared
///                        d_n-norm of a component orthogonal to the span
///   hellinger            density values on the quadrature nodes
///   empirical_hellinger  success probabilities on the design points
///   l2                   coefficient sequence
struct Point {
    std::vector<double> values;
    double residual_sq = 0.0;
};

class SemiMetric {
public:
    SemiMetric() = default;

    /// d_n^2(a,b) = (a-b)^T G (a-b) with G = Phi^T Phi / n.
    static SemiMetric empirical_l2(Eigen::MatrixXd gram);
    /// h^2(p,q) = int (sqrt p - sqrt q)^2 on the given rule.
    static SemiMetric hellinger(QuadratureRule rule);
    /// h_n^2(q1,q2) = n^-1 sum_i [(sqrt q1 - sqrt q2)^2 + (sqrt(1-q1) - sqrt(1-q2))^2].
    static SemiMetric empirical_hellinger();
    static SemiMetric l2();

    MetricKind kind() const { return kind_; }
    const QuadratureRule& quadrature() const { return rule_; }
    const Eigen::MatrixXd& gram() const { return gram_; }

    double distance_sq(const Point& a, const Point& b) const;
    double distance(const Point& a, const Point& b) const;

private:
    MetricKind kind_ = MetricKind::l2;
    Eigen::MatrixXd gram_;
    QuadratureRule rule_;
};

/// Closed form h^2 between regular histograms (cell probabilities), exact
/// for any bin counts by refining both to lcm(k, k') cells.
double histogram_hellinger_sq(std::span<const double> a, std::span<const double> b);

/// (sqrt a - sqrt b)^2 + (sqrt(1-a) - sqrt(1-b))^2
double bernoulli_hellinger_sq(double a, double b);

}  // namespace sieve
