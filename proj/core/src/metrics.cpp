#include "sieve/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sieve/error.hpp"

namespace sieve {

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::empirical_l2: return "empirical_l2";
        case MetricKind::hellinger: return "hellinger";
        case MetricKind::empirical_hellinger: return "empirical_hellinger";
        case MetricKind::l2: return "l2";
    }
    return "unknown";
}

SemiMetric SemiMetric::empirical_l2(Eigen::MatrixXd gram) {
    SemiMetric m;
    m.kind_ = MetricKind::empirical_l2;
    m.gram_ = std::move(gram);
    return m;
}

SemiMetric SemiMetric::hellinger(QuadratureRule rule) {
    SemiMetric m;
    m.kind_ = MetricKind::hellinger;
    m.rule_ = std::move(rule);
    return m;
}

SemiMetric SemiMetric::empirical_hellinger() {
    SemiMetric m;
    m.kind_ = MetricKind::empirical_hellinger;
    return m;
}

SemiMetric SemiMetric::l2() { return SemiMetric{}; }

double bernoulli_hellinger_sq(double a, double b) {
    const double d1 = std::sqrt(a) - std::sqrt(b);
    const double d2 = std::sqrt(1.0 - a) - std::sqrt(1.0 - b);
    return d1 * d1 + d2 * d2;
}

double SemiMetric::distance_sq(const Point& a, const Point& b) const {
    if (a.residual_sq != 0.0 && b.residual_sq != 0.0)
        throw InvalidArgument("at most one point may carry an orthogonal residual");
    const std::size_t na = a.values.size();
    const std::size_t nb = b.values.size();
    switch (kind_) {
        case MetricKind::l2: {
            const std::size_t m = std::max(na, nb);
            double total = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double d = (i < na ? a.values[i] : 0.0) - (i < nb ? b.values[i] : 0.0);
                total += d * d;
            }
            return total + a.residual_sq + b.residual_sq;
        }
        case MetricKind::empirical_l2: {
            const std::size_t m = std::max(na, nb);
            if (m > static_cast<std::size_t>(gram_.rows()))
                throw InvalidArgument("point dimension exceeds the design Gram matrix");
            Eigen::VectorXd diff = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
            for (std::size_t i = 0; i < na; ++i) diff[i] += a.values[i];
            for (std::size_t i = 0; i < nb; ++i) diff[i] -= b.values[i];
            const auto md = static_cast<Eigen::Index>(m);
            const double quad = diff.dot(gram_.topLeftCorner(md, md).selfadjointView<Eigen::Lower>() * diff);
            return std::max(0.0, quad) + a.residual_sq + b.residual_sq;
        }
        case MetricKind::hellinger: {
            if (na != rule_.size() || nb != rule_.size())
                throw InvalidArgument("hellinger points must be tabulated on the metric's rule");
            const auto w = rule_.weights();
            double total = 0.0;
            for (std::size_t i = 0; i < na; ++i) {
                const double d = std::sqrt(std::max(a.values[i], 0.0)) - std::sqrt(std::max(b.values[i], 0.0));
                total += w[i] * d * d;
            }
            return total;
        }
        case MetricKind::empirical_hellinger: {
            if (na != nb || na == 0)
                throw InvalidArgument("empirical hellinger points must share the design");
            double total = 0.0;
            for (std::size_t i = 0; i < na; ++i) total += bernoulli_hellinger_sq(a.values[i], b.values[i]);
            return total / static_cast<double>(na);
        }
    }
    return 0.0;
}

double SemiMetric::distance(const Point& a, const Point& b) const {
    return std::sqrt(distance_sq(a, b));
}

double histogram_hellinger_sq(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("histograms need at least one cell");
    const std::size_t ka = a.size();
    const std::size_t kb = b.size();
    const std::size_t k = std::lcm(ka, kb);
    const std::size_t ra = k / ka;
    const std::size_t rb = k / kb;
    // refined cell mass is a_j / ra; density equal within refined cells
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const double d = std::sqrt(a[c / ra] / ra) - std::sqrt(b[c / rb] / rb);
        total += d * d;
    }
    return total;
}

}  // namespace sieve
