#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sieve/error.hpp"
#include "sieve/family.hpp"
#include "sieve/metrics.hpp"

using namespace sieve;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, int k) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> v(k);
    double s = 0;
    for (double& x : v) s += (x = g(rng));
    for (double& x : v) x /= s;
    return v;
}

// Piecewise-constant integration over the merged breakpoints of both histograms.
double merged_hellinger(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> cuts{0.0, 1.0};
    for (std::size_t j = 1; j < a.size(); ++j) cuts.push_back(double(j) / a.size());
    for (std::size_t j = 1; j < b.size(); ++j) cuts.push_back(double(j) / b.size());
    std::sort(cuts.begin(), cuts.end());
    double total = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        const double pa = a.size() * a[std::min<std::size_t>(mid * a.size(), a.size() - 1)];
        const double pb = b.size() * b[std::min<std::size_t>(mid * b.size(), b.size() - 1)];
        const double d = std::sqrt(pa) - std::sqrt(pb);
        total += d * d * (cuts[i + 1] - cuts[i]);
    }
    return total;
}

void check_axioms(const SemiMetric& m, const std::vector<Point>& pts) {
    for (const auto& a : pts) {
        EXPECT_NEAR(m.distance(a, a), 0.0, 1e-12);
        for (const auto& b : pts) {
            const double ab = m.distance(a, b);
            EXPECT_GE(ab, 0.0);
            EXPECT_DOUBLE_EQ(ab, m.distance(b, a));
            for (const auto& c : pts) EXPECT_LE(ab, m.distance(a, c) + m.distance(c, b) + 1e-10);
        }
    }
}

}  // namespace

TEST(Metrics, AxiomsForAllFamilies) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0.0, 0.7);
    const int n = 200;

    RegressionFamily reg(n, 6, BasisKind::trigonometric);
    HistogramFamily hist(6);
    LogLinearFamily loglin(6, BasisKind::trigonometric, QuadratureRule::standard());
    ClassificationFamily cls(n, 6, BasisKind::cosine);
    std::vector<Point> pr, ph, pl, pc, p2;
    for (int t = 0; t < 6; ++t) {
        const int k = 1 + t % 6;
        Vector theta(k);
        for (int j = 0; j < k; ++j) theta[j] = z(rng);
        pr.push_back(reg.embed(theta));
        pl.push_back(loglin.embed(theta));
        pc.push_back(cls.embed(theta));
        const auto s = random_simplex(rng, k);
        ph.push_back(hist.embed(Eigen::Map<const Vector>(s.data(), k)));
        p2.push_back(Point{std::vector<double>(theta.data(), theta.data() + k), 0.0});
    }
    check_axioms(reg.metric(), pr);
    check_axioms(hist.metric(), ph);
    check_axioms(loglin.metric(), pl);
    check_axioms(cls.metric(), pc);
    check_axioms(SemiMetric::l2(), p2);
}

TEST(Metrics, HistogramClosedFormMatchesQuadrature) {
    std::mt19937_64 rng(8);
    HistogramFamily family(12);
    for (int k : {1, 2, 3, 5, 8, 12}) {
        for (int t = 0; t < 5; ++t) {
            const auto a = random_simplex(rng, k), b = random_simplex(rng, k);
            double closed = 0;
            for (int j = 0; j < k; ++j) closed += std::pow(std::sqrt(a[j]) - std::sqrt(b[j]), 2);
            const double quad = family.metric().distance_sq(family.embed(Eigen::Map<const Vector>(a.data(), k)),
                                                            family.embed(Eigen::Map<const Vector>(b.data(), k)));
            EXPECT_NEAR(quad, closed, 1e-10);
            EXPECT_NEAR(histogram_hellinger_sq(a, b), closed, 1e-14);
        }
    }
}

TEST(Metrics, HistogramHellingerAcrossBinCounts) {
    std::mt19937_64 rng(13);
    HistogramFamily family(9);
    for (auto [ka, kb] : {std::pair{2, 3}, {4, 6}, {5, 7}, {3, 9}, {1, 8}}) {
        const auto a = random_simplex(rng, ka), b = random_simplex(rng, kb);
        const double ref = merged_hellinger(a, b);
        EXPECT_NEAR(histogram_hellinger_sq(a, b), ref, 1e-13);
        const double quad = family.metric().distance_sq(family.embed(Eigen::Map<const Vector>(a.data(), ka)),
                                                        family.embed(Eigen::Map<const Vector>(b.data(), kb)));
        EXPECT_NEAR(quad, ref, 1e-10);
    }
}

TEST(Metrics, HellingerOfDisjointDensitiesIsTwo) {
    const std::vector<double> a{1.0, 0.0}, b{0.0, 1.0};
    EXPECT_NEAR(histogram_hellinger_sq(a, b), 2.0, 1e-15);
}

TEST(Metrics, BernoulliHellinger) {
    EXPECT_DOUBLE_EQ(bernoulli_hellinger_sq(0.3, 0.3), 0.0);
    const double a = 0.2, b = 0.7;
    EXPECT_NEAR(bernoulli_hellinger_sq(a, b),
                std::pow(std::sqrt(a) - std::sqrt(b), 2) + std::pow(std::sqrt(1 - a) - std::sqrt(1 - b), 2), 1e-15);
    const auto m = SemiMetric::empirical_hellinger();
    const Point p{{0.2, 0.5}, 0.0}, q{{0.7, 0.5}, 0.0};
    EXPECT_NEAR(m.distance_sq(p, q), bernoulli_hellinger_sq(0.2, 0.7) / 2.0, 1e-15);
}

TEST(Metrics, EmpiricalL2UsesGramAndResidual) {
    Eigen::MatrixXd g(2, 2);
    g << 1.0, 0.5, 0.5, 2.0;
    const auto m = SemiMetric::empirical_l2(g);
    const Point a{{1.0, 0.0}, 0.0}, b{{0.0, 1.0}, 0.0};
    // (1,-1) G (1,-1)' = 1 - 1 + 2 = 2
    EXPECT_NEAR(m.distance_sq(a, b), 2.0, 1e-15);
    const Point t{{1.0}, 0.25};  // zero-padded, orthogonal residual
    EXPECT_NEAR(m.distance_sq(t, a), 0.25, 1e-15);
    EXPECT_THROW((void)m.distance_sq(t, Point{{1.0}, 0.1}), InvalidArgument);
}
