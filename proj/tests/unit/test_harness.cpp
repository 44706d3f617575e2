#include <gtest/gtest.h>

#include <cmath>

#include "sieve/error.hpp"
#include "sieve/harness.hpp"

using namespace sieve;

namespace {

ExperimentConfig quick_config() {
    ExperimentConfig c;
    c.n_grid = {300};
    c.replicates = 4;
    c.draws = 300;
    c.L_grid = {0.5, 2.0};
    c.threads = 1;
    return c;
}

}  // namespace

TEST(Config, Validation) {
    auto c = quick_config();
    EXPECT_NO_THROW(c.validate());
    c.replicates = 0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = quick_config();
    c.n_grid = {2000, 500};
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = quick_config();
    c.alpha = 1.0;
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = quick_config();
    c.L_grid = {-1.0};
    EXPECT_THROW(c.validate(), InvalidArgument);
    c = quick_config();
    c.truth.beta = 0.5;
    EXPECT_THROW(c.validate(), InvalidArgument);
    EXPECT_THROW(ExperimentConfig::from_json(nlohmann::json::array()), InvalidArgument);
    EXPECT_THROW(ExperimentConfig::from_json({{"replicates", "many"}}), InvalidArgument);
}

TEST(Config, JsonRoundTrip) {
    auto c = quick_config();
    c.family = FamilyKind::log_linear;
    c.basis = BasisKind::cosine;
    c.truth.generator = TruthGenerator::sobolev_draw;
    c.truth.beta = 2.0;
    c.mode = RunMode::empirical;
    c.sampler.burn_in = 1234;
    c.evidence.importance_sampling = true;
    c.M_grid = {3.0};
    c.tail = {3, 2, 0.4};
    c.seed = 99;
    const auto j = c.to_json();
    const auto back = ExperimentConfig::from_json(j);
    EXPECT_EQ(back.to_json(), j);
    EXPECT_EQ(back.family, FamilyKind::log_linear);
    EXPECT_EQ(back.sampler.burn_in, 1234);
    EXPECT_EQ(back.tail.R0, 3);

    const auto partial = ExperimentConfig::from_json({{"family", "histogram"}, {"replicates", 3}});
    EXPECT_EQ(partial.prior.conditional.kind(), ConditionalPrior::Kind::dirichlet);
    EXPECT_EQ(partial.replicates, 3);
}

TEST(Coverage, DeterministicSingleReplicate) {
    auto c = quick_config();
    c.replicates = 1;
    const auto a = run_coverage(c);
    const auto b = run_coverage(c);
    EXPECT_EQ(a.records_csv(), b.records_csv());
    EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
    // thread count does not change the result
    c.replicates = 3;
    c.threads = 1;
    const auto s = run_coverage(c).records_csv();
    c.threads = 3;
    EXPECT_EQ(run_coverage(c).records_csv(), s);
}

TEST(Coverage, CellsAndMonotoneInL) {
    auto c = quick_config();
    c.replicates = 10;
    c.L_grid = {0.25, 0.5, 1.0, 2.0};
    const auto report = run_coverage(c);
    ASSERT_EQ(report.cells.size(), 8u);
    for (auto mode : {BallMode::hierarchical, BallMode::empirical}) {
        int prev = -1;
        for (double L : c.L_grid) {
            const auto& cell = report.cell(300, "coverage", mode, L);
            EXPECT_EQ(cell.replicates, 10);
            EXPECT_GE(cell.covered, prev);
            EXPECT_LE(cell.ci_lo, cell.coverage);
            EXPECT_GE(cell.ci_hi, cell.coverage);
            prev = cell.covered;
        }
    }
    EXPECT_THROW(report.cell(301, "coverage", BallMode::empirical, 2.0), InvalidArgument);
    const auto csv = report.records_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "n,arm,mode,L,replicate_id,covered,d_truth_center,r_alpha,inflation,k_hat,diameter");
}

TEST(Coverage, WellSpecifiedRegression) {
    ExperimentConfig c;
    c.truth.generator = TruthGenerator::explicit_coefficients;
    c.truth.coefficients = {0.8, -0.5, 0.3};
    c.n_grid = {2000};
    c.replicates = 60;
    c.L_grid = {2.0};
    c.mode = RunMode::empirical;
    c.draws = 500;
    const auto report = run_coverage(c);
    EXPECT_GE(report.cell(2000, "coverage", BallMode::empirical, 2.0).coverage, 0.9);
}

TEST(Negative, RequiresRegressionAndReportsArms) {
    auto c = quick_config();
    c.family = FamilyKind::histogram;
    c.prior = SievePriorSpec::default_for(FamilyKind::histogram);
    EXPECT_THROW(run_negative(c), InvalidArgument);
    c = quick_config();
    c.n_grid = {200, 800};
    const auto r = run_negative(c);
    for (int n : c.n_grid) {
        const auto& neg = r.cell(n, "negative", BallMode::empirical, std::pow(std::log(n), -0.25));
        const auto& ctl = r.cell(n, "control", BallMode::empirical, 2.0);
        EXPECT_LE(neg.covered, ctl.covered);
    }
}

TEST(Rate, ExactPowerLaw) {
    std::vector<RatePoint> pts;
    for (int n : {500, 2000, 8000, 32000}) {
        const double x = n / std::log(static_cast<double>(n));
        pts.push_back({n, std::log(0.7) - std::log(x) / 3.0, 0.0, 10});
    }
    const auto fit = fit_rate(pts, 1.0, BallMode::empirical);
    EXPECT_NEAR(fit.slope, -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(fit.target, -1.0 / 3.0, 1e-15);
    for (auto& p : pts) p.se = 0.01 * p.n / 500;
    EXPECT_NEAR(fit_rate(pts, 2.0, BallMode::empirical).slope, -1.0 / 3.0, 1e-12);
    EXPECT_NEAR(target_rate_slope(2.0), -0.4, 1e-15);
    pts.resize(2);
    EXPECT_THROW(fit_rate(pts, 1.0, BallMode::empirical), InvalidArgument);
    auto c = quick_config();
    c.n_grid = {100, 200};
    EXPECT_THROW(run_rate(c), InvalidArgument);
}

TEST(Diagnostics, PlateauTruthFailsPolishedTail) {
    auto c = quick_config();
    c.truth.generator = TruthGenerator::explicit_coefficients;
    c.truth.coefficients.assign(256, 0.0);
    for (int i = 1; i <= 256; i *= 4) c.truth.coefficients[i - 1] = std::pow(i, -0.75);
    c.tail = {2, 1, 0.9};
    c.n_grid = {500};
    c.replicates = 3;
    const auto r = run_diagnostics(c);
    ASSERT_EQ(r.summaries.size(), 1u);
    const auto& s = r.summaries.front();
    EXPECT_TRUE(s.tail_checked);
    EXPECT_FALSE(s.polished_tail);
    ASSERT_TRUE(s.first_violation);
    EXPECT_EQ(*s.first_violation, 1);
    EXPECT_EQ(r.to_json()["summaries"][0]["polished_tail"], false);
}

TEST(Diagnostics, FiniteSupportLocalizes) {
    auto c = quick_config();
    c.truth.generator = TruthGenerator::explicit_coefficients;
    c.truth.coefficients = {0.9, 0.4, -0.3, 0.2};
    c.n_grid = {1000};
    c.replicates = 20;
    const auto r = run_diagnostics(c);
    const auto& s = r.summaries.front();
    ASSERT_EQ(s.M.size(), 3u);
    EXPECT_EQ(s.M[1], 4.0);
    EXPECT_GE(s.k_hat_below_size_bound[1], 0.95);
    ASSERT_EQ(r.rows.size(), 20u);
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.k_hat_in.size(), 3u);
        for (double m : row.posterior_mass) {
            EXPECT_GE(m, 0.0);
            EXPECT_LE(m, 1.0 + 1e-12);
        }
    }
    const auto csv = r.rows_csv();
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "n,replicate_id,k_hat,k_mode,k_n,k_hat_in_M2,mass_M2,k_hat_in_M4,mass_M4,k_hat_in_M8,mass_M8");
    EXPECT_EQ(run_diagnostics(c).rows_csv(), csv);
}
