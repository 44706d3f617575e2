#pragma once

#include <span>
#include <string>
#include <vector>

namespace sieve {

/// log(sum(exp(values))) without overflow. Returns -inf for an empty span.
double log_sum_exp(std::span<const double> values);

struct Interval {
    double lo;
    double hi;
};

/// Wilson score interval for a binomial proportion; z = 1.96 gives 95%.
Interval wilson_interval(int successes, int trials, double z = 1.959963984540054);

struct LinearFit {
    double intercept;
    double slope;
    double slope_se;  // from residual variance; NaN with fewer than 3 points
};

LinearFit least_squares_line(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
double sample_variance(std::span<const double> v);

/// Lower empirical quantile: the smallest order statistic with rank >= ceil(p * size).
double lower_quantile(std::vector<double> values, double p);

/// Shortest round-trippable decimal text for CSV/JSON output.
std::string format_double(double value);

}  // namespace sieve
