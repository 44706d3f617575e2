#include "sieve/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "sieve/error.hpp"

namespace sieve {

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double top = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(top)) return top;
    double total = 0.0;
    for (double v : values) total += std::exp(v - top);
    return top + std::log(total);
}

Interval wilson_interval(int successes, int trials, double z) {
    if (trials <= 0) throw InvalidArgument("wilson_interval needs trials >= 1");
    if (successes < 0 || successes > trials) throw InvalidArgument("wilson_interval needs 0 <= successes <= trials");
    const double n = trials;
    const double p = successes / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {successes == 0 ? 0.0 : std::max(0.0, center - half),
            successes == trials ? 1.0 : std::min(1.0, center + half)};
}

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidArgument("least_squares_line needs at least two paired points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0) throw InvalidArgument("least_squares_line: x values are all equal");
    LinearFit fit{};
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() < 3) {
        fit.slope_se = std::numeric_limits<double>::quiet_NaN();
    } else {
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            rss += r * r;
        }
        fit.slope_se = std::sqrt(rss / (n - 2.0) / sxx);
    }
    return fit;
}

double mean(std::span<const double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_variance(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return ss / static_cast<double>(v.size() - 1);
}

double lower_quantile(std::vector<double> values, double p) {
    if (values.empty()) throw InvalidArgument("lower_quantile of an empty sample");
    const double s = static_cast<double>(values.size());
    // ceil with a guard against representation error in p * s
    auto rank = static_cast<std::size_t>(std::ceil(p * s - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
    return values[rank - 1];
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 6; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, value);
        if (std::strtod(buf, nullptr) == value) break;
    }
    return buf;
}

}  // namespace sieve
