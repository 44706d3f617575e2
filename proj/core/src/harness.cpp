#include "sieve/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <sstream>
#include <thread>

#include "sieve/dataset.hpp"
#include "sieve/error.hpp"
#include "sieve/rng.hpp"
#include "sieve/stats.hpp"

namespace sieve {

// ---------------------------------------------------------------------------
// Config

namespace {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::hierarchical: return "hierarchical";
        case RunMode::empirical: return "empirical";
        case RunMode::both: return "both";
    }
    return "both";
}

RunMode run_mode_from_string(const std::string& s) {
    if (s == "hierarchical") return RunMode::hierarchical;
    if (s == "empirical") return RunMode::empirical;
    if (s == "both") return RunMode::both;
    throw InvalidArgument("unknown mode '" + s + "' (expected hierarchical, empirical or both)");
}

}  // namespace

void ExperimentConfig::validate() const {
    if (replicates < 1) throw InvalidArgument("replicates must be >= 1");
    if (n_grid.empty()) throw InvalidArgument("n_grid must not be empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < 2) throw InvalidArgument("sample sizes must be >= 2");
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw InvalidArgument("n_grid must be strictly ascending");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    if (L_grid.empty()) throw InvalidArgument("L_grid must not be empty");
    for (double L : L_grid)
        if (!(L > 0.0)) throw InvalidArgument("L_grid entries must be positive");
    if (draws < 1) throw InvalidArgument("draws must be >= 1");
    if (!(report_M >= 1.0)) throw InvalidArgument("report_M must be >= 1");
    for (double M : M_grid)
        if (!(M >= 1.0)) throw InvalidArgument("M_grid entries must be >= 1");
    tail.validate();
    if (!(control_L > 0.0)) throw InvalidArgument("control_L must be positive");
    if (!(max_failure_fraction >= 0.0 && max_failure_fraction <= 1.0))
        throw InvalidArgument("max_failure_fraction must lie in [0,1]");
    if (threads < 0) throw InvalidArgument("threads must be >= 0");
    if ((family == FamilyKind::histogram) == prior.conditional.is_product())
        throw InvalidArgument(family == FamilyKind::histogram
                                  ? "the histogram family needs a Dirichlet conditional prior"
                                  : "Dirichlet conditional priors are only defined for histograms");
    if (truth.generator != TruthGenerator::explicit_coefficients && !(truth.beta > 0.5))
        throw InvalidArgument("truth beta must exceed 1/2");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json t = {{"generator", sieve::to_string(truth.generator)},
                        {"beta", truth.beta},
                        {"L0", truth.L0},
                        {"length", truth.length},
                        {"seed", truth.seed}};
    if (!truth.coefficients.empty()) t["coefficients"] = truth.coefficients;
    return {{"family", sieve::to_string(family)},
            {"basis", sieve::to_string(basis)},
            {"truth", t},
            {"n_grid", n_grid},
            {"replicates", replicates},
            {"alpha", alpha},
            {"L_grid", L_grid},
            {"mode", to_string(mode)},
            {"prior", prior.to_json()},
            {"seed", seed},
            {"draws", draws},
            {"sampler",
             {{"burn_in", sampler.burn_in},
              {"target_acceptance", sampler.target_acceptance},
              {"min_chain", sampler.min_chain},
              {"force_mcmc", sampler.force_mcmc}}},
            {"evidence",
             {{"importance_sampling", evidence.importance_sampling},
              {"particles", evidence.particles},
              {"min_ess", evidence.min_ess},
              {"force_approximation", evidence.force_approximation}}},
            {"report_M", report_M},
            {"M_grid", M_grid},
            {"tail", {{"R0", tail.R0}, {"k0", tail.k0}, {"tau", tail.tau}}},
            {"m_exponent", m_exponent},
            {"control_L", control_L},
            {"max_failure_fraction", max_failure_fraction},
            {"out_dir", out_dir},
            {"threads", threads}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw InvalidArgument("experiment config must be a JSON object");
    ExperimentConfig c;
    try {
        if (j.contains("family")) c.family = family_from_string(j.at("family").get<std::string>());
        if (j.contains("basis")) c.basis = basis_from_string(j.at("basis").get<std::string>());
        if (j.contains("truth")) {
            const auto& t = j.at("truth");
            if (t.contains("generator")) c.truth.generator = generator_from_string(t.at("generator").get<std::string>());
            c.truth.beta = t.value("beta", c.truth.beta);
            c.truth.L0 = t.value("L0", c.truth.L0);
            c.truth.length = t.value("length", c.truth.length);
            c.truth.seed = t.value("seed", c.truth.seed);
            if (t.contains("coefficients")) c.truth.coefficients = t.at("coefficients").get<std::vector<double>>();
        }
        c.n_grid = j.value("n_grid", c.n_grid);
        c.replicates = j.value("replicates", c.replicates);
        c.alpha = j.value("alpha", c.alpha);
        c.L_grid = j.value("L_grid", c.L_grid);
        if (j.contains("mode")) c.mode = run_mode_from_string(j.at("mode").get<std::string>());
        c.prior = j.contains("prior") ? SievePriorSpec::from_json(j.at("prior")) : SievePriorSpec::default_for(c.family);
        c.seed = j.value("seed", c.seed);
        c.draws = j.value("draws", c.draws);
        if (j.contains("sampler")) {
            const auto& s = j.at("sampler");
            c.sampler.burn_in = s.value("burn_in", c.sampler.burn_in);
            c.sampler.target_acceptance = s.value("target_acceptance", c.sampler.target_acceptance);
            c.sampler.min_chain = s.value("min_chain", c.sampler.min_chain);
            c.sampler.force_mcmc = s.value("force_mcmc", c.sampler.force_mcmc);
        }
        if (j.contains("evidence")) {
            const auto& e = j.at("evidence");
            c.evidence.importance_sampling = e.value("importance_sampling", c.evidence.importance_sampling);
            c.evidence.particles = e.value("particles", c.evidence.particles);
            c.evidence.min_ess = e.value("min_ess", c.evidence.min_ess);
            c.evidence.force_approximation = e.value("force_approximation", c.evidence.force_approximation);
        }
        c.report_M = j.value("report_M", c.report_M);
        c.M_grid = j.value("M_grid", c.M_grid);
        if (j.contains("tail")) {
            const auto& t = j.at("tail");
            c.tail.R0 = t.value("R0", c.tail.R0);
            c.tail.k0 = t.value("k0", c.tail.k0);
            c.tail.tau = t.value("tau", c.tail.tau);
        }
        c.m_exponent = j.value("m_exponent", c.m_exponent);
        c.control_L = j.value("control_L", c.control_L);
        c.max_failure_fraction = j.value("max_failure_fraction", c.max_failure_fraction);
        c.out_dir = j.value("out_dir", c.out_dir);
        c.threads = j.value("threads", c.threads);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("malformed experiment config: ") + e.what());
    }
    c.validate();
    return c;
}

TruthSpec make_truth(const ExperimentConfig& config) {
    const auto& t = config.truth;
    if (t.generator == TruthGenerator::explicit_coefficients) {
        if (t.coefficients.empty()) {
            if (config.family != FamilyKind::histogram)
                throw InvalidArgument("explicit truth needs coefficients");
            return default_histogram_truth();
        }
        TruthSpec truth;
        truth.family = config.family;
        truth.generator = TruthGenerator::explicit_coefficients;
        truth.basis = config.basis;
        truth.beta = t.beta;
        truth.L0 = t.L0;
        truth.coefficients = t.coefficients;
        if (config.family == FamilyKind::histogram && histogram_truth_min(truth) <= 0.0)
            throw InvalidArgument("explicit histogram truth is not a positive density");
        return truth;
    }
    return generate_truth(config.family, t.generator, t.beta, t.L0, t.length, t.seed, config.basis);
}

BiasProfile truth_bias_profile(const ExperimentConfig& config, const TruthSpec& truth, int n, int min_k_max) {
    int limit = 64;
    switch (config.family) {
        case FamilyKind::regression:
        case FamilyKind::classification: limit = std::max(1, n / 2); break;
        case FamilyKind::histogram: limit = 128; break;
        case FamilyKind::log_linear: limit = 64; break;
    }
    int k_max = std::min(limit, std::max(min_k_max, 8));
    while (true) {
        const auto family = make_family(config.family, FamilyOptions{n, k_max, config.basis});
        BiasProfile profile = bias(truth, *family, k_max, n);
        if ((profile.k_n() && *profile.k_n() * config.tail.R0 <= k_max) || k_max >= limit) return profile;
        k_max = std::min(limit, 2 * k_max);
    }
}

// ---------------------------------------------------------------------------
// Replicate machinery

namespace {

constexpr std::uint64_t kEvidenceStream = 1;
constexpr std::uint64_t kEmpiricalStream = 2;
constexpr std::uint64_t kHierarchicalStream = 3;

int worker_count(int configured) {
    if (configured > 0) return configured;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on a pool; body must not throw.
template <class Body>
void parallel_for(int count, int threads, Body&& body) {
    const int workers = std::min(count, worker_count(threads));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) body(i);
        });
    for (auto& t : pool) t.join();
}

struct SizeContext {
    int n;
    int k_cap;
    std::unique_ptr<ModelFamily> family;
    Simulator simulator;
    Point truth_point;
    HyperPrior hyper;
    BiasProfile profile;
    std::optional<std::vector<int>> tradeoff;
};

SizeContext make_context(const ExperimentConfig& config, const TruthSpec& truth, int n) {
    const int k_cap = config.prior.k_cap(n);
    auto family = make_family(config.family, FamilyOptions{n, k_cap, config.basis});
    if (auto* reg = dynamic_cast<const RegressionFamily*>(family.get()); reg && reg->design().certified_dim() < k_cap)
        throw InvalidArgument("design with n = " + std::to_string(n) + " does not certify dimension " +
                              std::to_string(k_cap));
    Point truth_point = family->embed_truth(truth);
    BiasProfile profile = truth_bias_profile(config, truth, n, k_cap);
    std::optional<std::vector<int>> tradeoff;
    if (profile.k_n()) tradeoff = tradeoff_set(profile, config.report_M);
    return SizeContext{n,        k_cap,  std::move(family), Simulator(truth, n), std::move(truth_point),
                       config.prior.hyper(n), std::move(profile), std::move(tradeoff)};
}

struct BallOutcome {
    int k = 0;  // k_hat, or the k-posterior mode
    CredibleBall ball;
    double distance = 0.0;
};

struct ReplicateResult {
    bool ok = false;
    std::string error;
    int k_hat = 0;
    KPosterior posterior;
    std::optional<BallOutcome> empirical;
    std::optional<BallOutcome> hierarchical;
};

BallOutcome make_outcome(BallMode mode, const PosteriorDraws& draws, const SizeContext& ctx,
                         const ExperimentConfig& config, int k) {
    const Point center = posterior_center(draws, *ctx.family);
    BallOutcome out;
    out.k = k;
    out.ball = build_ball(mode, draws, center, *ctx.family, config.alpha, 1.0, ctx.n,
                          mode == BallMode::empirical ? std::optional<int>(k) : std::nullopt);
    out.distance = ctx.family->metric().distance(ctx.truth_point, out.ball.center);
    return out;
}

ReplicateResult run_replicate(const ExperimentConfig& config, const SizeContext& ctx, int r, bool empirical,
                              bool hierarchical) {
    ReplicateResult res;
    try {
        const std::uint64_t data_seed = mix_seed(config.seed + static_cast<std::uint64_t>(r),
                                                 static_cast<std::uint64_t>(ctx.n));
        const Dataset data = ctx.simulator.draw(data_seed);
        const auto lik = ctx.family->bind(data);
        EvidenceOptions ev = config.evidence;
        ev.seed = mix_seed(data_seed, kEvidenceStream);
        const auto table = marginal_likelihood_table(*ctx.family, config.prior.conditional, *lik, ctx.k_cap, ev);
        res.k_hat = mmle(table);
        res.posterior = k_posterior(table, ctx.hyper);
        if (empirical) {
            const auto draws = sample_given_k(*ctx.family, config.prior.conditional, *lik, res.k_hat, config.draws,
                                              mix_seed(data_seed, kEmpiricalStream), config.sampler);
            res.empirical = make_outcome(BallMode::empirical, draws, ctx, config, res.k_hat);
        }
        if (hierarchical) {
            const auto draws =
                sample_hierarchical(*ctx.family, config.prior.conditional, *lik, res.posterior, config.draws,
                                    mix_seed(data_seed, kHierarchicalStream), config.sampler);
            res.hierarchical = make_outcome(BallMode::hierarchical, draws, ctx, config, res.posterior.mode());
        }
        res.ok = true;
    } catch (const Error& e) {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

std::vector<ReplicateResult> run_size(const ExperimentConfig& config, const SizeContext& ctx, bool empirical,
                                      bool hierarchical, int& failures) {
    std::vector<ReplicateResult> results(static_cast<std::size_t>(config.replicates));
    std::vector<std::exception_ptr> fatal(results.size());
    parallel_for(config.replicates, config.threads, [&](int r) {
        try {
            results[r] = run_replicate(config, ctx, r, empirical, hierarchical);
        } catch (...) {
            fatal[r] = std::current_exception();
        }
    });
    for (auto& e : fatal)
        if (e) std::rethrow_exception(e);
    failures = 0;
    std::string first_error;
    for (const auto& res : results)
        if (!res.ok) {
            if (failures == 0) first_error = res.error;
            ++failures;
        }
    if (failures > config.max_failure_fraction * config.replicates)
        throw Error(std::to_string(failures) + " of " + std::to_string(config.replicates) +
                    " replicates failed at n = " + std::to_string(ctx.n) + " (first: " + first_error + ")");
    return results;
}

bool in_set(const std::optional<std::vector<int>>& set, int k) {
    return set && std::binary_search(set->begin(), set->end(), k);
}

ReplicateRow make_row(const SizeContext& ctx, const std::string& arm, const BallOutcome& outcome, double L,
                      double inflation, int r) {
    CredibleBall ball = outcome.ball;
    ball.inflation = inflation;
    ReplicateRow row;
    row.n = ctx.n;
    row.arm = arm;
    row.mode = ball.mode;
    row.L = L;
    row.record.replicate_id = r;
    row.record.covered = outcome.distance <= ball.effective_radius();
    row.record.d_truth_center = outcome.distance;
    row.record.r_alpha = ball.r_alpha;
    row.record.inflation = inflation;
    row.record.k_hat = outcome.k;
    row.record.diameter = diameter_proxy(ball);
    row.in_tradeoff = in_set(ctx.tradeoff, outcome.k);
    return row;
}

void summarize(CoverageReport& report) {
    // rows are grouped by (n, arm, mode, L) in insertion order
    std::vector<std::tuple<int, std::string, BallMode, double>> keys;
    for (const auto& row : report.rows) {
        const auto key = std::make_tuple(row.n, row.arm, row.mode, row.L);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& [n, arm, mode, L] : keys) {
        CellSummary cell;
        cell.n = n;
        cell.arm = arm;
        cell.mode = mode;
        cell.L = L;
        std::vector<double> diam;
        int in_tradeoff = 0;
        for (const auto& row : report.rows) {
            if (row.n != n || row.arm != arm || row.mode != mode || row.L != L) continue;
            ++cell.replicates;
            cell.covered += row.record.covered;
            diam.push_back(row.record.diameter);
            ++cell.k_hist[row.record.k_hat];
            in_tradeoff += row.in_tradeoff;
        }
        cell.coverage = static_cast<double>(cell.covered) / cell.replicates;
        const auto ci = wilson_interval(cell.covered, cell.replicates);
        cell.ci_lo = ci.lo;
        cell.ci_hi = ci.hi;
        cell.mean_diam = mean(diam);
        cell.diam_q10 = lower_quantile(diam, 0.1);
        cell.diam_q50 = lower_quantile(diam, 0.5);
        cell.diam_q90 = lower_quantile(diam, 0.9);
        cell.tradeoff_fraction = static_cast<double>(in_tradeoff) / cell.replicates;
        report.cells.push_back(std::move(cell));
    }
}

nlohmann::json k_hist_json(const std::map<int, int>& hist) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, c] : hist) j[std::to_string(k)] = c;
    return j;
}

nlohmann::json failures_json(const std::map<int, int>& failures) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [n, c] : failures) j[std::to_string(n)] = c;
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Coverage

const CellSummary& CoverageReport::cell(int n, const std::string& arm, BallMode mode, double L) const {
    for (const auto& c : cells)
        if (c.n == n && c.arm == arm && c.mode == mode && std::abs(c.L - L) <= 1e-12 * std::max(1.0, std::abs(L)))
            return c;
    throw InvalidArgument("no coverage cell for n = " + std::to_string(n) + ", arm " + arm + ", mode " +
                          to_string(mode) + ", L = " + format_double(L));
}

nlohmann::json CoverageReport::to_json() const {
    nlohmann::json cj = nlohmann::json::array();
    for (const auto& c : cells)
        cj.push_back({{"n", c.n},
                      {"arm", c.arm},
                      {"mode", to_string(c.mode)},
                      {"L", c.L},
                      {"replicates", c.replicates},
                      {"covered", c.covered},
                      {"coverage", c.coverage},
                      {"ci_lo", c.ci_lo},
                      {"ci_hi", c.ci_hi},
                      {"mean_diam", c.mean_diam},
                      {"diam_q10", c.diam_q10},
                      {"diam_q50", c.diam_q50},
                      {"diam_q90", c.diam_q90},
                      {"k_hist", k_hist_json(c.k_hist)},
                      {"tradeoff_fraction", c.tradeoff_fraction}});
    return {{"cells", cj}, {"failures", failures_json(failures)}};
}

std::string CoverageReport::records_csv() const {
    std::ostringstream out;
    out << "n,arm,mode,L," << coverage_csv_header() << '\n';
    for (const auto& row : rows)
        out << row.n << ',' << row.arm << ',' << to_string(row.mode) << ',' << format_double(row.L) << ','
            << to_csv_row(row.record) << '\n';
    return out.str();
}

CoverageReport run_coverage(const ExperimentConfig& config) {
    config.validate();
    const TruthSpec truth = make_truth(config);
    const bool eb = config.mode != RunMode::hierarchical;
    const bool hb = config.mode != RunMode::empirical;
    CoverageReport report;
    for (int n : config.n_grid) {
        const SizeContext ctx = make_context(config, truth, n);
        int failures = 0;
        const auto results = run_size(config, ctx, eb, hb, failures);
        report.failures[n] = failures;
        for (const BallMode mode : {BallMode::hierarchical, BallMode::empirical}) {
            for (double L : config.L_grid) {
                const double inflation = inflation_factor(L, n);
                for (int r = 0; r < config.replicates; ++r) {
                    const auto& res = results[r];
                    if (!res.ok) continue;
                    const auto& outcome = mode == BallMode::empirical ? res.empirical : res.hierarchical;
                    if (outcome) report.rows.push_back(make_row(ctx, "coverage", *outcome, L, inflation, r));
                }
            }
        }
    }
    summarize(report);
    return report;
}

CoverageReport run_negative(const ExperimentConfig& config) {
    config.validate();
    if (config.family != FamilyKind::regression) throw InvalidArgument("the negative experiment needs regression");
    const TruthSpec truth = make_truth(config);
    CoverageReport report;
    for (int n : config.n_grid) {
        const SizeContext ctx = make_context(config, truth, n);
        int failures = 0;
        const auto results = run_size(config, ctx, true, false, failures);
        report.failures[n] = failures;
        const double m_n = std::pow(std::log(static_cast<double>(n)), config.m_exponent);
        for (const auto& [arm, L] : {std::pair<std::string, double>{"negative", m_n}, {"control", config.control_L}}) {
            const double inflation = inflation_factor(L, n);
            for (int r = 0; r < config.replicates; ++r)
                if (results[r].ok) report.rows.push_back(make_row(ctx, arm, *results[r].empirical, L, inflation, r));
        }
    }
    summarize(report);
    return report;
}

// ---------------------------------------------------------------------------
// Rate

double target_rate_slope(double beta) {
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    return -beta / (1.0 + 2.0 * beta);
}

RateFit fit_rate(std::vector<RatePoint> points, double beta, BallMode mode) {
    if (points.size() < 3) throw InvalidArgument("rate fit needs at least three sample sizes");
    RateFit fit;
    fit.mode = mode;
    fit.target = target_rate_slope(beta);
    std::vector<double> x, y, w;
    bool weighted = true;
    for (const auto& p : points) {
        if (p.n < 3) throw InvalidArgument("rate fit needs n >= 3");
        const double nn = p.n;
        x.push_back(std::log(nn / std::log(nn)));
        y.push_back(p.mean_log_diameter);
        if (!(p.se > 0.0)) weighted = false;
        w.push_back(p.se > 0.0 ? 1.0 / (p.se * p.se) : 1.0);
    }
    if (!weighted) std::fill(w.begin(), w.end(), 1.0);
    double sw = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        sx += w[i] * x[i];
        sy += w[i] * y[i];
    }
    const double xbar = sx / sw, ybar = sy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
        sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) throw InvalidArgument("rate fit needs distinct sample sizes");
    fit.slope = sxy / sxx;
    if (weighted) {
        fit.slope_se = std::sqrt(1.0 / sxx);
    } else {
        double rss = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - ybar - fit.slope * (x[i] - xbar);
            rss += e * e;
        }
        fit.slope_se = std::sqrt(rss / (x.size() - 2.0) / sxx);
    }
    fit.points = std::move(points);
    return fit;
}

const RateFit& RateReport::fit(BallMode mode) const {
    for (const auto& f : fits)
        if (f.mode == mode) return f;
    throw InvalidArgument("no rate fit for mode " + to_string(mode));
}

nlohmann::json RateReport::to_json() const {
    nlohmann::json fj = nlohmann::json::array();
    for (const auto& f : fits) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : f.points)
            pts.push_back({{"n", p.n},
                           {"mean_log_diameter", p.mean_log_diameter},
                           {"se", p.se},
                           {"replicates", p.replicates}});
        fj.push_back({{"mode", to_string(f.mode)},
                      {"slope", f.slope},
                      {"slope_se", f.slope_se},
                      {"target", f.target},
                      {"points", pts}});
    }
    return {{"fits", fj}};
}

RateReport run_rate(const ExperimentConfig& config) {
    config.validate();
    if (config.n_grid.size() < 3) throw InvalidArgument("rate check needs at least three sample sizes");
    const TruthSpec truth = make_truth(config);
    const bool eb = config.mode != RunMode::hierarchical;
    const bool hb = config.mode != RunMode::empirical;
    std::vector<RatePoint> eb_points, hb_points;
    for (int n : config.n_grid) {
        const SizeContext ctx = make_context(config, truth, n);
        int failures = 0;
        const auto results = run_size(config, ctx, eb, hb, failures);
        auto point = [&](BallMode mode) {
            std::vector<double> logs;
            for (const auto& res : results) {
                if (!res.ok) continue;
                const auto& o = mode == BallMode::empirical ? res.empirical : res.hierarchical;
                logs.push_back(std::log(diameter_proxy(o->ball)));
            }
            RatePoint p;
            p.n = n;
            p.replicates = static_cast<int>(logs.size());
            p.mean_log_diameter = mean(logs);
            p.se = logs.size() > 1 ? std::sqrt(sample_variance(logs) / logs.size()) : 0.0;
            return p;
        };
        if (eb) eb_points.push_back(point(BallMode::empirical));
        if (hb) hb_points.push_back(point(BallMode::hierarchical));
    }
    const double beta = config.truth.beta;
    RateReport report;
    if (hb) report.fits.push_back(fit_rate(std::move(hb_points), beta, BallMode::hierarchical));
    if (eb) report.fits.push_back(fit_rate(std::move(eb_points), beta, BallMode::empirical));
    return report;
}

// ---------------------------------------------------------------------------
// Diagnostics

nlohmann::json DiagnosticReport::to_json() const {
    nlohmann::json sj = nlohmann::json::array();
    for (const auto& s : summaries) {
        nlohmann::json per_m = nlohmann::json::array();
        for (std::size_t i = 0; i < s.M.size(); ++i)
            per_m.push_back({{"M", s.M[i]},
                             {"k_hat_fraction", s.k_hat_fraction[i]},
                             {"mean_posterior_mass", s.mean_posterior_mass[i]},
                             {"k_hat_below_size_bound", s.k_hat_below_size_bound[i]}});
        nlohmann::json entry = {{"n", s.n},
                                {"k_n", s.k_n ? nlohmann::json(*s.k_n) : nlohmann::json("beyond range")},
                                {"polished_tail", s.tail_checked ? nlohmann::json(s.polished_tail) : nlohmann::json()},
                                {"per_M", per_m},
                                {"bias", s.profile.to_json()}};
        if (s.first_violation) entry["first_violation"] = *s.first_violation;
        sj.push_back(entry);
    }
    return {{"summaries", sj}, {"failures", failures_json(failures)}};
}

std::string DiagnosticReport::rows_csv() const {
    std::ostringstream out;
    out << "n,replicate_id,k_hat,k_mode,k_n";
    if (!summaries.empty())
        for (double M : summaries.front().M) out << ",k_hat_in_M" << format_double(M) << ",mass_M" << format_double(M);
    out << '\n';
    for (const auto& r : rows) {
        out << r.n << ',' << r.replicate_id << ',' << r.k_hat << ',' << r.k_mode << ',' << r.k_n;
        for (std::size_t i = 0; i < r.k_hat_in.size(); ++i)
            out << ',' << (r.k_hat_in[i] ? 1 : 0) << ',' << format_double(r.posterior_mass[i]);
        out << '\n';
    }
    return out.str();
}

DiagnosticReport run_diagnostics(const ExperimentConfig& config) {
    config.validate();
    const TruthSpec truth = make_truth(config);
    DiagnosticReport report;
    for (int n : config.n_grid) {
        const SizeContext ctx = make_context(config, truth, n);
        int failures = 0;
        const auto results = run_size(config, ctx, false, false, failures);
        report.failures[n] = failures;

        DiagnosticSummary s;
        s.n = n;
        s.k_n = ctx.profile.k_n();
        s.profile = ctx.profile;
        s.M = config.M_grid;
        try {
            const auto tail = check_polished_tail(ctx.profile, config.tail);
            s.tail_checked = true;
            s.polished_tail = tail.holds;
            s.first_violation = tail.first_violation;
        } catch (const RangeError&) {
            s.tail_checked = false;
        }
        std::vector<std::optional<std::vector<int>>> sets;
        for (double M : config.M_grid)
            sets.push_back(s.k_n ? std::optional<std::vector<int>>(tradeoff_set(ctx.profile, M)) : std::nullopt);

        const std::size_t m_count = config.M_grid.size();
        s.k_hat_fraction.assign(m_count, 0.0);
        s.mean_posterior_mass.assign(m_count, 0.0);
        s.k_hat_below_size_bound.assign(m_count, 0.0);
        int ok = 0;
        for (int r = 0; r < config.replicates; ++r) {
            const auto& res = results[r];
            if (!res.ok) continue;
            ++ok;
            DiagnosticRow row;
            row.n = n;
            row.replicate_id = r;
            row.k_hat = res.k_hat;
            row.k_mode = res.posterior.mode();
            row.k_n = s.k_n.value_or(0);
            for (std::size_t i = 0; i < m_count; ++i) {
                const bool in = in_set(sets[i], res.k_hat);
                double mass = 0.0;
                if (sets[i])
                    for (int k : *sets[i]) mass += res.posterior.mass(k);
                row.k_hat_in.push_back(in);
                row.posterior_mass.push_back(std::min(1.0, mass));
                s.k_hat_fraction[i] += in;
                s.mean_posterior_mass[i] += row.posterior_mass.back();
                if (s.k_n) s.k_hat_below_size_bound[i] += res.k_hat <= 2.0 * config.M_grid[i] * config.M_grid[i] * *s.k_n;
            }
            report.rows.push_back(std::move(row));
        }
        for (std::size_t i = 0; i < m_count && ok > 0; ++i) {
            s.k_hat_fraction[i] /= ok;
            s.mean_posterior_mass[i] /= ok;
            s.k_hat_below_size_bound[i] /= ok;
        }
        report.summaries.push_back(std::move(s));
    }
    return report;
}

}  // namespace sieve
