#include <gtest/gtest.h>

#include <cmath>

#include "sieve/bias.hpp"
#include "sieve/error.hpp"
#include "sieve/family.hpp"

using namespace sieve;

namespace {

TruthSpec power_truth(double exponent, int length) {
    TruthSpec t;
    for (int i = 1; i <= length; ++i) t.coefficients.push_back(std::pow(i, -exponent));
    return t;
}

// b(k) = sum_{i > k} theta_i^2 summed front to back, independent of the library
std::vector<double> tail_scan(const TruthSpec& t, int k_max) {
    std::vector<double> out;
    for (int k = 1; k <= k_max; ++k) {
        double s = 0;
        for (std::size_t i = k; i < t.coefficients.size(); ++i) s += t.coefficients[i] * t.coefficients[i];
        out.push_back(s);
    }
    return out;
}

}  // namespace

TEST(BiasProfile, FiniteSupportRegression) {
    TruthSpec t;
    t.coefficients = {0.8, -0.4, 0.3, 0.2, -0.1};
    RegressionFamily family(400, 10, BasisKind::trigonometric);
    for (int n : {2, 10, 1000}) {
        const auto p = bias(t, family, 10, n);
        for (int k = 5; k <= 10; ++k) EXPECT_NEAR(p.b(k), 0.0, 1e-14);
        ASSERT_TRUE(p.k_n());
        EXPECT_LE(*p.k_n(), 5);
        EXPECT_LE(p.b(*p.k_n()), p.penalty(*p.k_n()));
    }
}

TEST(BiasProfile, PowerLawBalanceIndexByScan) {
    const auto t = power_truth(1.5, 4096);
    const int n = 1000;
    const auto p = l2_bias(t, 64, n);
    const auto ref = tail_scan(t, 64);
    int expect = 0;
    for (int k = 1; k <= 64; ++k) {
        EXPECT_NEAR(p.b(k), ref[k - 1], 1e-13);
        if (!expect && ref[k - 1] <= k * std::log(1000.0) / 1000) expect = k;
    }
    ASSERT_TRUE(p.k_n());
    EXPECT_EQ(*p.k_n(), expect);
    EXPECT_EQ(expect, 4);
}

TEST(BiasProfile, ZeroTruth) {
    TruthSpec t;
    const auto p = l2_bias(t, 8, 100);
    for (int k = 1; k <= 8; ++k) EXPECT_EQ(p.b(k), 0.0);
    EXPECT_EQ(*p.k_n(), 1);
}

TEST(BiasProfile, BeyondRangeAndValidation) {
    const auto t = power_truth(0.75, 4096);
    const auto p = l2_bias(t, 3, 1000000);
    EXPECT_FALSE(p.k_n());
    EXPECT_THROW(tradeoff_set(p, 2.0), RangeError);
    EXPECT_EQ(p.to_json()["k_n"], "beyond range");
    EXPECT_THROW(BiasProfile({0.1, -0.2}, 10), InvalidArgument);
    EXPECT_THROW(p.b(4), RangeError);
}

TEST(TradeoffSet, Examples) {
    const auto flat = l2_bias(TruthSpec{}, 20, 100);
    EXPECT_EQ(tradeoff_set(flat, 2.0), (std::vector<int>{1, 2, 3, 4}));
    const auto t = power_truth(1.5, 4096);
    const auto p = l2_bias(t, 128, 1000);
    const auto one = tradeoff_set(p, 1.0);
    EXPECT_NE(std::find(one.begin(), one.end(), *p.k_n()), one.end());

    const auto set = tradeoff_set(p, 2.0);
    const auto ref = tail_scan(t, 128);
    const double pen = std::log(1000.0) / 1000;
    const int kn = *p.k_n();
    std::vector<int> expect;
    for (int k = 1; k <= 128; ++k)
        if (std::sqrt(ref[k - 1] + k * pen) <= 2 * std::sqrt(ref[kn - 1] + kn * pen)) expect.push_back(k);
    EXPECT_EQ(set, expect);
}

TEST(TradeoffSet, WithinSizeBoundAndContainsMinimizer) {
    for (double e : {0.8, 1.5, 2.5}) {
        for (int n : {100, 2000, 50000}) {
            const auto p = l2_bias(power_truth(e, 4096), 512, n);
            ASSERT_TRUE(p.k_n());
            int argmin = 1;
            for (int k = 2; k <= p.k_max(); ++k)
                if (p.eps2(k) < p.eps2(argmin)) argmin = k;
            const auto one = tradeoff_set(p, 1.0);
            EXPECT_NE(std::find(one.begin(), one.end(), argmin), one.end());
            for (double M : {1.0, 2.0, 4.0, 8.0})
                for (int k : tradeoff_set(p, M)) EXPECT_LE(k, 2 * M * M * *p.k_n());
        }
    }
}

TEST(PolishedTail, ConstantRatio) {
    for (double beta : {0.75, 1.0, 2.0}) {
        std::vector<double> b;
        for (int k = 1; k <= 200; ++k) b.push_back(std::pow(k, -2 * beta));
        // n large enough for k_n well inside the profile
        const BiasProfile p(b, 5000);
        ASSERT_TRUE(p.k_n());
        const auto r = check_polished_tail(p, {2, 1, std::pow(2.0, -2 * beta) * (1 + 1e-12)});
        EXPECT_TRUE(r.holds);
        EXPECT_FALSE(r.first_violation);
    }
}

TEST(PolishedTail, PlateauFailsForAnyTau) {
    // support {4^m}: b(2k) = b(k) at every k = 4^m
    TruthSpec t;
    t.coefficients.assign(4096, 0.0);
    for (int i = 1; i <= 4096; i *= 4) t.coefficients[i - 1] = std::pow(i, -0.75);
    const auto p = l2_bias(t, 256, 2000);
    ASSERT_TRUE(p.k_n());
    EXPECT_EQ(p.b(8), p.b(4));
    for (double tau : {0.5, 0.9, 0.999}) {
        const auto r = check_polished_tail(p, {2, 1, tau});
        EXPECT_FALSE(r.holds);
        ASSERT_TRUE(r.first_violation);
        int expect = 0;
        for (int k = 1; k <= *p.k_n() && !expect; ++k)
            if (p.b(k) > 0 && p.b(2 * k) > tau * p.b(k)) expect = k;
        EXPECT_EQ(*r.first_violation, expect);
    }
}

TEST(PolishedTail, GeometricThreshold) {
    for (double rho : {0.3, 0.5, 0.8}) {
        std::vector<double> b;
        for (int k = 1; k <= 400; ++k) b.push_back(std::pow(rho, k));
        const BiasProfile p(b, 1000);
        const int kn = *p.k_n();
        for (int R0 : {2, 3}) {
            for (int k0 = 1; k0 <= kn; ++k0) {
                const double tau = std::pow(rho, (R0 - 1) * k0);
                if (tau >= 1) continue;
                EXPECT_TRUE(check_polished_tail(p, {R0, k0, std::min(tau * (1 + 1e-9), 0.999999)}).holds);
                const auto r = check_polished_tail(p, {R0, k0, tau * 0.999});
                EXPECT_FALSE(r.holds);
                EXPECT_EQ(r.first_violation.value_or(-1), k0);
            }
        }
    }
}

TEST(PolishedTail, VacuousAndRange) {
    std::vector<double> b{0.5, 0.1, 0, 0, 0, 0, 0, 0};
    const BiasProfile p(b, 100);
    EXPECT_TRUE(check_polished_tail(p, {2, 3, 0.1}).holds);
    const auto t = power_truth(1.5, 4096);
    const auto narrow = l2_bias(t, 5, 1000);  // k_n = 4 needs b(8)
    EXPECT_THROW(check_polished_tail(narrow, {2, 1, 0.5}), RangeError);
    EXPECT_THROW(PolishedTailParams({1, 1, 0.5}).validate(), InvalidArgument);
    EXPECT_THROW(PolishedTailParams({2, 0, 0.5}).validate(), InvalidArgument);
    EXPECT_THROW(PolishedTailParams({2, 1, 1.0}).validate(), InvalidArgument);
}

TEST(PolishedTail, SelfSimilarAgainstHandRatios) {
    const auto t = generate_truth(FamilyKind::regression, TruthGenerator::self_similar, 1.0, 1.0, 4096, 5);
    const double tau = 1.05 * 0.25;
    for (int n : {1000, 100000}) {
        const auto p = l2_bias(t, 256, n);
        const auto ref = tail_scan(t, 256);
        for (int k0 : {2, 11}) {
            if (k0 > *p.k_n()) continue;
            std::optional<int> expect;
            for (int k = k0; k <= *p.k_n() && !expect; ++k)
                if (ref[2 * k - 1] > tau * ref[k - 1]) expect = k;
            const auto r = check_polished_tail(p, {2, k0, tau});
            EXPECT_EQ(r.holds, !expect);
            EXPECT_EQ(r.first_violation, expect);
        }
    }
    // b(4)/b(2) = 0.3166 exceeds tau at k = 2; from k = 11 on every ratio is below it
    EXPECT_FALSE(check_polished_tail(l2_bias(t, 256, 100000), {2, 2, tau}).holds);
    EXPECT_TRUE(check_polished_tail(l2_bias(t, 256, 100000), {2, 11, tau}).holds);
}

TEST(BiasSandwich, Cases) {
    std::vector<double> mono;
    for (int k = 1; k <= 64; ++k) mono.push_back(1.0 / k);
    const BiasProfile p(mono, 100);
    for (double A0 : {1.5, 2.0, 4.0})
        for (int k0 : {1, 3, 8}) EXPECT_TRUE(check_bias_sandwich(p, A0, k0));
    std::vector<double> up{0.01, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
    EXPECT_TRUE(check_bias_sandwich(BiasProfile(up, 10), 2.0, 1));
    EXPECT_FALSE(check_bias_sandwich(BiasProfile(up, 10), 2.0, 2));
}

TEST(BiasSandwich, HistogramAgainstEnumeration) {
    const auto truth = default_histogram_truth();
    HistogramFamily family(32);
    const auto p = bias(truth, family, 32, 1000);
    for (int k0 = 1; k0 <= 10; ++k0) {
        for (double A0 : {2.0, 3.0}) {
            bool expect = true;
            for (int k = 1; k < k0; ++k) {
                bool found = false;
                for (int kp = k0; kp <= static_cast<int>(A0 * k0); ++kp) found |= p.b(k) >= p.b(kp);
                expect &= found;
            }
            EXPECT_EQ(check_bias_sandwich(p, A0, k0), expect) << k0 << ' ' << A0;
        }
    }
}

TEST(BiasProfile, CsvAndJson) {
    const BiasProfile p({0.5, 0.25}, 10);
    EXPECT_EQ(p.to_csv().substr(0, 14), "k,b_k,eps2_k\n1");
    const auto j = p.to_json();
    EXPECT_EQ(j["values"].size(), 2u);
    EXPECT_EQ(j["k_n"], 2);
}
