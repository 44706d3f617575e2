#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sieve/bias.hpp"
#include "sieve/credible.hpp"
#include "sieve/inference.hpp"
#include "sieve/priors.hpp"
#include "sieve/truth.hpp"

namespace sieve {

enum class RunMode { hierarchical, empirical, both };

struct TruthConfig {
    TruthGenerator generator = TruthGenerator::self_similar;
    double beta = 1.0;
    double L0 = 1.0;
    int length = kDefaultTruthLength;
    std::uint64_t seed = 7;
    /// Used with explicit_coefficients; empty selects the default histogram truth.
    std::vector<double> coefficients;
};

struct ExperimentConfig {
    FamilyKind family = FamilyKind::regression;
    BasisKind basis = BasisKind::trigonometric;
    TruthConfig truth;
    std::vector<int> n_grid{2000};
    int replicates = 200;
    double alpha = 0.05;
    std::vector<double> L_grid{0.5, 1.0, 2.0, 4.0};
    RunMode mode = RunMode::both;
    SievePriorSpec prior;
    std::uint64_t seed = 1;
    int draws = 2000;
    SamplerOptions sampler;
    EvidenceOptions evidence;
    /// M used for the trade-off membership columns of coverage reports.
    double report_M = 8.0;
    /// Diagnostics: M values and polished-tail parameters for the truth.
    std::vector<double> M_grid{2.0, 4.0, 8.0};
    PolishedTailParams tail{2, 2, 0.5};
    /// Negative experiment: inflation (log n)^m_exponent sqrt(log n) vs control_L sqrt(log n).
    double m_exponent = -0.25;
    double control_L = 2.0;
    double max_failure_fraction = 0.02;
    std::string out_dir = ".";
    int threads = 0;  // 0: hardware concurrency

    /// Throws InvalidArgument on replicates < 1, unsorted n_grid, alpha outside (0,1).
    void validate() const;
    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
};

TruthSpec make_truth(const ExperimentConfig& config);

struct ReplicateRow {
    int n = 0;
    std::string arm;  // coverage, negative, control
    BallMode mode = BallMode::empirical;
    double L = 0.0;
    CoverageRecord record;
    bool in_tradeoff = false;
};

struct CellSummary {
    int n = 0;
    std::string arm;
    BallMode mode = BallMode::empirical;
    double L = 0.0;
    int replicates = 0;
    int covered = 0;
    double coverage = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double mean_diam = 0.0;
    double diam_q10 = 0.0;
    double diam_q50 = 0.0;
    double diam_q90 = 0.0;
    std::map<int, int> k_hist;
    double tradeoff_fraction = 0.0;
};

struct CoverageReport {
    std::vector<CellSummary> cells;
    std::vector<ReplicateRow> rows;
    std::map<int, int> failures;  // n -> excluded replicates

    /// First cell matching the key; throws InvalidArgument if absent.
    const CellSummary& cell(int n, const std::string& arm, BallMode mode, double L) const;

    nlohmann::json to_json() const;
    /// replicate_id, covered, d_truth_center, r_alpha, inflation, k_hat,
    /// diameter, prefixed by n, arm, mode and L.
    std::string records_csv() const;
};

/// Simulate, infer (EB and/or HB), build balls over L_grid, check coverage.
/// Replicate r uses seed + r, mixed with n for the data stream. Throws Error if
/// more than max_failure_fraction of the replicates at some n fail.
CoverageReport run_coverage(const ExperimentConfig& config);

/// Empirical Bayes regression with inflation m_n sqrt(log n), m_n = (log n)^m_exponent,
/// alongside the control arm L = control_L.
CoverageReport run_negative(const ExperimentConfig& config);

struct RatePoint {
    int n = 0;
    double mean_log_diameter = 0.0;
    double se = 0.0;
    int replicates = 0;
};

struct RateFit {
    BallMode mode = BallMode::empirical;
    std::vector<RatePoint> points;
    double slope = 0.0;
    double slope_se = 0.0;
    double target = 0.0;
};

struct RateReport {
    std::vector<RateFit> fits;
    const RateFit& fit(BallMode mode) const;
    nlohmann::json to_json() const;
};

/// -beta / (1 + 2 beta)
double target_rate_slope(double beta);

/// Slope of log diameter against log(n / log n), weighted by per-n standard errors.
RateFit fit_rate(std::vector<RatePoint> points, double beta, BallMode mode);

/// Requires at least three sample sizes.
RateReport run_rate(const ExperimentConfig& config);

struct DiagnosticRow {
    int n = 0;
    int replicate_id = 0;
    int k_hat = 0;
    int k_mode = 0;
    int k_n = 0;
    std::vector<bool> k_hat_in;         // per M in M_grid
    std::vector<double> posterior_mass;  // pi_k(K_n(M) | Y) per M
};

struct DiagnosticSummary {
    int n = 0;
    std::optional<int> k_n;
    bool tail_checked = false;  // false when the profile cannot reach R0 k_n
    bool polished_tail = false;
    std::optional<int> first_violation;
    std::vector<double> M;
    std::vector<double> k_hat_fraction;   // per M
    std::vector<double> mean_posterior_mass;  // per M
    std::vector<double> k_hat_below_size_bound;  // fraction with k_hat <= 2 M^2 k_n
    BiasProfile profile;
};

struct DiagnosticReport {
    std::vector<DiagnosticSummary> summaries;
    std::vector<DiagnosticRow> rows;
    std::map<int, int> failures;

    nlohmann::json to_json() const;
    std::string rows_csv() const;
};

DiagnosticReport run_diagnostics(const ExperimentConfig& config);

/// Bias profile of the configured truth in the family metric at sample size n,
/// extended until it covers R0 k_n (bounded by the design size).
BiasProfile truth_bias_profile(const ExperimentConfig& config, const TruthSpec& truth, int n,
                               int min_k_max);

}  // namespace sieve
