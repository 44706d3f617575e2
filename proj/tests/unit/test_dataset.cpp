#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "sieve/dataset.hpp"
#include "sieve/error.hpp"
#include "sieve/family.hpp"

using namespace sieve;

namespace {

TruthSpec zero_truth(FamilyKind family) {
    TruthSpec t;
    t.family = family;
    t.coefficients = {0.0};
    return t;
}

}  // namespace

TEST(Simulate, ZeroSignalRegressionIsNoise) {
    const int n = 5000;
    const auto d = simulate(zero_truth(FamilyKind::regression), n, 17);
    double m = 0;
    for (double y : d.y) m += y;
    m /= n;
    EXPECT_LT(std::abs(m), 4.0 / std::sqrt(n));
    EXPECT_EQ(d.x.size(), static_cast<std::size_t>(n));
}

TEST(Simulate, UniformHistogramBinFrequencies) {
    const int n = 100000, k = 8;
    const auto d = simulate(zero_truth(FamilyKind::histogram), n, 3);
    const auto counts = histogram_counts(d.y, k);
    const double p = 1.0 / k;
    for (int c : counts) EXPECT_LT(std::abs(c / double(n) - p), 4 * std::sqrt(p * (1 - p) / n));
    EXPECT_TRUE(d.x.empty());
}

TEST(Simulate, FairCoinClassification) {
    const int n = 4000;
    const auto d = simulate(zero_truth(FamilyKind::classification), n, 8);
    double m = 0;
    for (double y : d.y) {
        ASSERT_TRUE(y == 0.0 || y == 1.0);
        m += y;
    }
    EXPECT_LT(std::abs(m / n - 0.5), 4.0 / (2 * std::sqrt(n)));
}

TEST(Simulate, LogLinearDrawsFollowTheTruthCdf) {
    TruthSpec t;
    t.family = FamilyKind::log_linear;
    t.coefficients = {0.8, -0.4, 0.3};
    const int n = 20000;
    auto d = simulate(t, n, 21);
    std::sort(d.y.begin(), d.y.end());
    auto f = [&](double x) { return std::exp(t.series(x)); };
    const double z = oracle::simpson(f, 0, 1);
    double ks = 0;
    for (double q : {0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9}) {
        const double cdf = oracle::simpson(f, 0, q, 4000) / z;
        const double emp = static_cast<double>(std::lower_bound(d.y.begin(), d.y.end(), q) - d.y.begin()) / n;
        ks = std::max(ks, std::abs(cdf - emp));
    }
    EXPECT_LT(ks, 1.63 / std::sqrt(n));  // 1% Kolmogorov critical value
    EXPECT_GE(d.y.front(), 0.0);
    EXPECT_LE(d.y.back(), 1.0);
}

TEST(Simulate, DeterministicInSeed) {
    const auto t = generate_truth(FamilyKind::classification, TruthGenerator::self_similar, 1.0, 1.0, 64, 2);
    const auto a = simulate(t, 300, 99), b = simulate(t, 300, 99), c = simulate(t, 300, 100);
    EXPECT_EQ(a.y, b.y);
    EXPECT_NE(a.y, c.y);
    Simulator sim(t, 300);
    EXPECT_EQ(sim.draw(99).y, a.y);
}

TEST(Simulate, CsvRoundTrip) {
    const auto t = generate_truth(FamilyKind::regression, TruthGenerator::self_similar, 1.0, 1.0, 32, 4);
    const auto d = simulate(t, 25, 5);
    const std::string csv = to_csv(d);
    EXPECT_EQ(csv.substr(0, 4), "x,y\n");
    const auto back = dataset_from_csv(csv, FamilyKind::regression);
    EXPECT_EQ(back.x, d.x);
    EXPECT_EQ(back.y, d.y);

    const auto h = simulate(default_histogram_truth(), 10, 6);
    const auto hb = dataset_from_csv(to_csv(h), FamilyKind::histogram);
    EXPECT_EQ(hb.y, h.y);
    EXPECT_THROW(dataset_from_csv("x,y\n0.5,2\n", FamilyKind::classification), InvalidArgument);
}
