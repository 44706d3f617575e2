// Acceptance checks. Run all with no arguments, or one with --criterion N.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "../unit/oracles.hpp"
#include "sieve/dataset.hpp"
#include "sieve/harness.hpp"
#include "sieve/inference.hpp"
#include "sieve/stats.hpp"

using namespace sieve;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// 1. closed-form evidence vs brute-force quadrature over theta
Outcome conjugate_oracle() {
    double worst = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        TruthSpec t;
        t.coefficients = {0.7, -0.4};
        const auto data = simulate(t, 5, seed);
        RegressionFamily family(5, 2, BasisKind::trigonometric);
        const auto lik = family.bind(data);
        const auto prior = ConditionalPrior::gaussian();
        auto lik_at = [&](double a, double b, int k) {
            double s = 1;
            for (int i = 0; i < 5; ++i) {
                double f = a * oracle::phi_trig(1, data.x[i]);
                if (k == 2) f += b * oracle::phi_trig(2, data.x[i]);
                s *= oracle::normal_pdf(data.y[i], f, 1.0);
            }
            return s;
        };
        const double m1 = oracle::simpson([&](double a) { return lik_at(a, 0, 1) * oracle::normal_pdf(a, 0, 1); }, -10, 10);
        const double m2 = oracle::simpson(
            [&](double a) {
                return oracle::normal_pdf(a, 0, 1) *
                       oracle::simpson([&](double b) { return lik_at(a, b, 2) * oracle::normal_pdf(b, 0, 1); }, -10, 10, 800);
            },
            -10, 10, 800);
        const double e1 = std::exp(marginal_likelihood(family, prior, *lik, 1).log_m);
        const double e2 = std::exp(marginal_likelihood(family, prior, *lik, 2).log_m);
        worst = std::max({worst, std::abs(e1 / m1 - 1), std::abs(e2 / m2 - 1)});
    }
    return {worst <= 1e-6, "max relative error " + fmt(worst) + " (tolerance 1e-6)"};
}

// 2. Dirichlet-multinomial evidence vs prior-predictive Monte Carlo
Outcome dirichlet_oracle() {
    const auto data = simulate(default_histogram_truth(), 10, 4);
    HistogramFamily family(4);
    const auto lik = family.bind(data);
    const auto prior = ConditionalPrior::dirichlet(1.0);
    std::mt19937_64 rng(2024);
    std::gamma_distribution<double> gam(1.0, 1.0);
    const int draws = 2000000;
    bool ok = true;
    double worst_z = 0;
    for (int k = 1; k <= 4; ++k) {
        const auto counts = histogram_counts(data.y, k);
        double sum = 0, sq = 0;
        std::vector<double> th(k);
        for (int s = 0; s < draws; ++s) {
            double tot = 0;
            for (auto& v : th) tot += (v = gam(rng));
            double logp = 0;
            for (int j = 0; j < k; ++j) logp += counts[j] * std::log(k * th[j] / tot);
            const double p = std::exp(logp);
            sum += p;
            sq += p * p;
        }
        const double mean = sum / draws;
        const double se = std::sqrt((sq / draws - mean * mean) / draws);
        const double exact = std::exp(marginal_likelihood(family, prior, *lik, k).log_m);
        const double z = se > 0 ? std::abs(exact - mean) / se : (exact == mean ? 0 : INFINITY);
        worst_z = std::max(worst_z, z);
        ok &= z <= 3;
    }
    return {ok, "max |exact - MC| / SE = " + fmt(worst_z) + " over k = 1..4 (tolerance 3)"};
}

// 3. Metropolis and Laplace routes against the conjugate closed forms
Outcome mcmc_validation() {
    const int n = 200, k = 3;
    TruthSpec t;
    t.coefficients = {1.0, 0.5, 0.25};
    RegressionFamily family(n, 6, BasisKind::trigonometric);
    const auto lik = family.bind(simulate(t, n, 11));
    const auto& rl = dynamic_cast<const RegressionLikelihood&>(*lik);
    const Matrix prec = rl.cross().topLeftCorner(k, k) + Matrix::Identity(k, k);
    const Matrix cov = prec.inverse();
    const Vector mean = prec.ldlt().solve(rl.projected_y().head(k));

    SamplerOptions opt;
    opt.force_mcmc = true;
    const int count = 50000, batches = 50, per = count / batches;
    const auto draws = sample_given_k(family, ConditionalPrior::gaussian(), *lik, k, count, 3, opt);
    bool ok = draws.diagnostics.front().mcmc;
    double worst = 0;
    for (int j = 0; j < k; ++j) {
        // batch means for the mean and for the squared deviation from the exact mean
        std::vector<double> bm(batches), bv(batches);
        for (int b = 0; b < batches; ++b) {
            double s = 0, v = 0;
            for (int i = b * per; i < (b + 1) * per; ++i) {
                s += draws.theta[i][j];
                v += std::pow(draws.theta[i][j] - mean[j], 2);
            }
            bm[b] = s / per;
            bv[b] = v / per;
        }
        for (const auto* series : {&bm, &bv}) {
            double m = 0, var = 0;
            for (double x : *series) m += x / batches;
            for (double x : *series) var += (x - m) * (x - m) / (batches - 1);
            const double target = series == &bm ? mean[j] : cov(j, j);
            const double z = std::abs(m - target) / std::sqrt(var / batches);
            worst = std::max(worst, z);
            ok &= z <= 3;
        }
    }
    double gap = 0;
    for (int kk = 1; kk <= 6; ++kk) {
        EvidenceOptions eo;
        eo.force_approximation = true;
        gap = std::max(gap, std::abs(marginal_likelihood(family, ConditionalPrior::gaussian(), *lik, kk, eo).log_m -
                                     marginal_likelihood(family, ConditionalPrior::gaussian(), *lik, kk).log_m));
    }
    ok &= gap <= 1e-8;
    return {ok, "max batch-means z " + fmt(worst) + " (tolerance 3), acceptance " +
                    fmt(draws.diagnostics.front().acceptance_rate) + ", Laplace log m gap " + fmt(gap) +
                    " (tolerance 1e-8)"};
}

// 4. grad c(theta) = E_theta phi_j vs central differences
Outcome gradient_check() {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> z(0.0, 1.0);
    double worst = 0;
    for (auto basis : {BasisKind::trigonometric, BasisKind::cosine}) {
        LogLinearFamily family(6, basis, QuadratureRule::standard());
        const auto& d = family.density();
        for (int t = 0; t < 20; ++t) {
            const int k = 1 + t % 6;
            Vector theta(k);
            for (auto& v : theta) v = z(rng);
            const Vector g = d.basis_expectation(theta);
            for (int j = 0; j < k; ++j) {
                const double h = 1e-5;
                Vector up = theta, dn = theta;
                up[j] += h;
                dn[j] -= h;
                const double fd = (d.log_normalizer(up) - d.log_normalizer(dn)) / (2 * h);
                worst = std::max(worst, std::abs(fd - g[j]) / std::max(std::abs(g[j]), 1e-3));
            }
        }
    }
    return {worst <= 1e-6, "max relative error " + fmt(worst) + " at 20 random theta per basis, k <= 6 (tolerance 1e-6)"};
}

// 5. coverage at L = 2 for all four families and both modes
Outcome positive_coverage() {
    bool ok = true;
    std::ostringstream detail;
    for (auto family : {FamilyKind::regression, FamilyKind::histogram, FamilyKind::log_linear,
                        FamilyKind::classification}) {
        ExperimentConfig c;
        c.family = family;
        c.prior = SievePriorSpec::default_for(family);
        c.n_grid = {2000};
        c.replicates = 200;
        c.L_grid = {2.0};
        c.mode = RunMode::both;
        const auto start = std::chrono::steady_clock::now();
        const auto report = run_coverage(c);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (auto mode : {BallMode::hierarchical, BallMode::empirical}) {
            const auto& cell = report.cell(2000, "coverage", mode, 2.0);
            const bool pass = cell.coverage >= 0.90 && cell.ci_lo >= 0.85;
            ok &= pass;
            detail << ' ' << to_string(family) << '/' << to_string(mode) << "=" << fmt(cell.coverage) << " [lo "
                   << fmt(cell.ci_lo) << "]" << (pass ? "" : "!");
        }
        detail << " (" << fmt(secs) << " s)";
        std::fflush(stdout);
    }
    return {ok, "coverage" + detail.str()};
}

// 6. log-diameter slopes
Outcome rate_check() {
    bool ok = true;
    std::ostringstream detail;
    for (double beta : {1.0, 2.0}) {
        ExperimentConfig c;
        c.truth.beta = beta;
        c.n_grid = {500, 2000, 8000};
        c.replicates = 200;
        c.L_grid = {1.0};
        c.mode = RunMode::both;
        const auto report = run_rate(c);
        const auto& eb = report.fit(BallMode::empirical);
        const auto& hb = report.fit(BallMode::hierarchical);
        ok &= std::abs(eb.slope - eb.target) <= 0.15;
        detail << " beta=" << fmt(beta) << ": EB slope " << fmt(eb.slope) << " (HB " << fmt(hb.slope) << ") target "
               << fmt(eb.target) << ';';
    }
    return {ok, "empirical-Bayes slope within 0.15 of target:" + detail.str()};
}

// 7. undersized inflation loses coverage
Outcome negative_result() {
    ExperimentConfig c;
    c.n_grid = {500, 2000, 8000};
    c.replicates = 200;
    const auto report = run_negative(c);
    std::vector<double> neg, ctl;
    for (int n : c.n_grid) {
        neg.push_back(report.cell(n, "negative", BallMode::empirical, std::pow(std::log(n), -0.25)).coverage);
        ctl.push_back(report.cell(n, "control", BallMode::empirical, 2.0).coverage);
    }
    const bool decreasing = neg[0] > neg[1] && neg[1] > neg[2];
    const bool gap = ctl[2] - neg[2] >= 0.25;
    return {decreasing && gap, "negative arm " + fmt(neg[0]) + ", " + fmt(neg[1]) + ", " + fmt(neg[2]) +
                                   "; control " + fmt(ctl[0]) + ", " + fmt(ctl[1]) + ", " + fmt(ctl[2]) +
                                   "; gap at n=8000 " + fmt(ctl[2] - neg[2]) + " (needs strict decrease and >= 0.25)"};
}

// 8. k_hat and the k posterior localize on K_n(8)
Outcome localization() {
    ExperimentConfig c;
    c.n_grid = {2000};
    c.replicates = 100;
    c.M_grid = {8.0};
    const auto report = run_diagnostics(c);
    const auto& s = report.summaries.front();
    const double frac = s.k_hat_fraction[0], mass = s.mean_posterior_mass[0];
    return {frac >= 0.9 && mass >= 0.9,
            "k_hat in K_n(8): " + fmt(frac) + ", mean posterior mass of K_n(8): " + fmt(mass) + " (each >= 0.9)"};
}

// 9. the unit suite
Outcome property_suites() {
    const char* path = std::getenv("SIEVE_UNIT_TESTS");
    if (!path) return {false, "SIEVE_UNIT_TESTS is not set"};
    const auto start = std::chrono::steady_clock::now();
    const int rc = std::system((std::string("\"") + path + "\" --gtest_brief=1 > /dev/null 2>&1").c_str());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {rc == 0 && secs < 120, std::string(rc == 0 ? "all unit tests green" : "unit tests failed") + " in " +
                                       fmt(secs) + " s (limit 120 s)"};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 10. byte-identical coverage CSVs across two CLI runs
Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / ("sieve_determinism_" + std::to_string(::getpid()));
    fs::create_directories(root);
    ExperimentConfig c;
    c.n_grid = {500, 1000};
    c.replicates = 30;
    c.draws = 500;
    c.mode = RunMode::both;
    c.seed = 12345;
    {
        std::ofstream out(root / "config.json");
        out << c.to_json().dump(2);
    }
    std::string csv[2];
    for (int run = 0; run < 2; ++run) {
        const fs::path dir = root / ("run" + std::to_string(run));
        const std::string cmd = std::string("\"") + SIEVE_CLI_PATH + "\" --config \"" + (root / "config.json").string() +
                                "\" --out-dir \"" + dir.string() + "\" coverage > /dev/null 2>&1";
        if (std::system(cmd.c_str()) != 0) return {false, "CLI coverage run failed"};
        csv[run] = slurp(dir / "coverage_records.csv");
    }
    fs::remove_all(root);
    const bool same = !csv[0].empty() && csv[0] == csv[1];
    return {same, std::to_string(csv[0].size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"conjugate oracle", conjugate_oracle}, {"Dirichlet oracle", dirichlet_oracle},
        {"MCMC validation", mcmc_validation},   {"gradient check", gradient_check},
        {"positive coverage", positive_coverage}, {"rate check", rate_check},
        {"negative result", negative_result},   {"localization", localization},
        {"property suites", property_suites},   {"determinism", determinism}};
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i) + 1 != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %zu (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        all &= o.pass;
    }
    return all ? 0 : 1;
}
