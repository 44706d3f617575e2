// sieve: command line front end for the simulation and inference library.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sieve/bias.hpp"
#include "sieve/credible.hpp"
#include "sieve/dataset.hpp"
#include "sieve/error.hpp"
#include "sieve/harness.hpp"
#include "sieve/inference.hpp"
#include "sieve/rng.hpp"
#include "sieve/stats.hpp"

namespace fs = std::filesystem;
using namespace sieve;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::optional<int> threads;
};

ExperimentConfig load_config(const Globals& g) {
    ExperimentConfig config;
    if (!g.config_path.empty()) {
        std::ifstream in(g.config_path);
        if (!in) throw InvalidArgument("cannot open config " + g.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw InvalidArgument("config " + g.config_path + " is not valid JSON: " + e.what());
        }
        config = ExperimentConfig::from_json(j);
    }
    if (g.seed) config.seed = *g.seed;
    if (g.threads) config.threads = *g.threads;
    config.out_dir = g.out_dir;
    config.validate();
    return config;
}

void write_file(const Globals& g, const std::string& name, const std::string& text) {
    fs::create_directories(g.out_dir);
    const fs::path path = fs::path(g.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    std::cout << "wrote " << path.string() << '\n';
}

void write_json(const Globals& g, const std::string& name, const nlohmann::json& j) {
    write_file(g, name, j.dump(2) + "\n");
}

int pick_n(const ExperimentConfig& config, int n) { return n > 0 ? n : config.n_grid.front(); }

struct Problem {
    TruthSpec truth;
    Dataset data;
    std::unique_ptr<ModelFamily> family;
    std::unique_ptr<Likelihood> likelihood;
    int k_cap;
};

// Data from --data, or simulated from the configured truth.
Problem load_problem(const ExperimentConfig& config, int n, const std::string& data_path) {
    Problem p;
    p.truth = make_truth(config);
    if (!data_path.empty()) {
        std::ifstream in(data_path);
        if (!in) throw InvalidArgument("cannot open data " + data_path);
        std::stringstream ss;
        ss << in.rdbuf();
        p.data = dataset_from_csv(ss.str(), config.family);
        n = p.data.n();
    } else {
        p.data = simulate(p.truth, n, mix_seed(config.seed, static_cast<std::uint64_t>(n)));
    }
    p.k_cap = config.prior.k_cap(n);
    p.family = make_family(config.family, FamilyOptions{n, p.k_cap, config.basis});
    p.likelihood = p.family->bind(p.data);
    return p;
}

MarginalLikelihoodTable table_for(const ExperimentConfig& config, const Problem& p) {
    EvidenceOptions ev = config.evidence;
    ev.seed = mix_seed(config.seed, 1);
    return marginal_likelihood_table(*p.family, config.prior.conditional, *p.likelihood, p.k_cap, ev);
}

PosteriorDraws draws_for(const ExperimentConfig& config, const Problem& p, BallMode mode, int k) {
    if (mode == BallMode::empirical)
        return sample_given_k(*p.family, config.prior.conditional, *p.likelihood, k, config.draws,
                              mix_seed(config.seed, 2), config.sampler);
    const auto post = k_posterior(table_for(config, p), config.prior.hyper(p.data.n()));
    return sample_hierarchical(*p.family, config.prior.conditional, *p.likelihood, post, config.draws,
                               mix_seed(config.seed, 3), config.sampler);
}

nlohmann::json diagnostics_json(const PosteriorDraws& draws) {
    nlohmann::json d = nlohmann::json::array();
    for (const auto& s : draws.diagnostics) d.push_back(s.to_json());
    return d;
}

BallMode ball_mode(const std::string& s) {
    if (s == "empirical") return BallMode::empirical;
    if (s == "hierarchical") return BallMode::hierarchical;
    throw InvalidArgument("mode must be empirical or hierarchical");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sieve-prior credible sets: simulation, inference and coverage experiments"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "experiment config (JSON)")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "base seed (overrides the config)");
    app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);

    int n = 0;
    std::string data_path;
    int k = 0;
    std::string mode = "empirical";
    double L = 2.0;
    int k_max = 0;
    PolishedTailParams tail;

    auto* simulate_cmd = app.add_subcommand("simulate", "draw one dataset from the configured truth");
    simulate_cmd->add_option("-n,--n", n, "sample size (default: first of n_grid)");

    auto* bias_cmd = app.add_subcommand("bias", "bias profile b(k), k_n and the polished-tail check");
    bias_cmd->add_option("-n,--n", n, "sample size");
    bias_cmd->add_option("--k-max", k_max, "largest k (default: enough to reach R0 k_n)");
    bias_cmd->add_option("--r0", tail.R0, "polished tail R0")->capture_default_str();
    bias_cmd->add_option("--k0", tail.k0, "polished tail k0")->capture_default_str();
    bias_cmd->add_option("--tau", tail.tau, "polished tail tau")->capture_default_str();

    auto* mmle_cmd = app.add_subcommand("mmle", "marginal likelihood table, k_hat and the k posterior");
    auto* posterior_cmd = app.add_subcommand("posterior", "posterior draws given k, or hierarchical");
    auto* credible_cmd = app.add_subcommand("credible", "credible ball and its coverage of the truth");
    for (auto* cmd : {mmle_cmd, posterior_cmd, credible_cmd}) {
        cmd->add_option("-n,--n", n, "sample size when simulating");
        cmd->add_option("--data", data_path, "dataset CSV instead of simulating")->check(CLI::ExistingFile);
    }
    posterior_cmd->add_option("-k,--k", k, "model dimension (default: k_hat)");
    for (auto* cmd : {posterior_cmd, credible_cmd})
        cmd->add_option("--mode", mode, "empirical or hierarchical")->capture_default_str();
    credible_cmd->add_option("-L,--L", L, "inflation constant")->capture_default_str();

    auto* coverage_cmd = app.add_subcommand("coverage", "coverage experiment over n_grid and L_grid");
    auto* negative_cmd = app.add_subcommand("negative", "undersized-inflation experiment with control arm");
    auto* rate_cmd = app.add_subcommand("rate", "log-diameter slope over n_grid");
    auto* diagnostics_cmd = app.add_subcommand("diagnostics", "k_hat localization and trade-off diagnostics");

    CLI11_PARSE(app, argc, argv);

    try {
        const ExperimentConfig config = load_config(g);
        if (simulate_cmd->parsed()) {
            const int size = pick_n(config, n);
            const TruthSpec truth = make_truth(config);
            write_json(g, "truth.json", to_json(truth));
            write_file(g, "data.csv", to_csv(simulate(truth, size, mix_seed(config.seed, size))));
        } else if (bias_cmd->parsed()) {
            const int size = pick_n(config, n);
            ExperimentConfig c = config;
            c.tail = tail;
            tail.validate();
            const TruthSpec truth = make_truth(c);
            const BiasProfile profile =
                k_max > 0 ? bias(truth, *make_family(c.family, FamilyOptions{size, k_max, c.basis}), k_max, size)
                          : truth_bias_profile(c, truth, size, c.prior.k_cap(size));
            nlohmann::json j = profile.to_json();
            try {
                const auto report = check_polished_tail(profile, tail);
                j["polished_tail"] = report.holds;
                if (report.first_violation) j["first_violation"] = *report.first_violation;
            } catch (const RangeError& e) {
                j["polished_tail"] = nullptr;
                j["polished_tail_note"] = e.what();
            }
            write_file(g, "bias.csv", profile.to_csv());
            write_json(g, "bias.json", j);
        } else if (mmle_cmd->parsed()) {
            const Problem p = load_problem(config, pick_n(config, n), data_path);
            const auto table = table_for(config, p);
            const auto post = k_posterior(table, config.prior.hyper(p.data.n()));
            nlohmann::json masses = nlohmann::json::array();
            for (int kk = 1; kk <= post.cap(); ++kk) masses.push_back(post.mass(kk));
            write_file(g, "mmle_table.csv", table.to_csv());
            write_json(g, "mmle.json",
                       {{"n", p.data.n()}, {"k_cap", p.k_cap}, {"k_hat", mmle(table)}, {"k_posterior", masses},
                        {"k_posterior_mode", post.mode()}});
        } else if (posterior_cmd->parsed()) {
            const Problem p = load_problem(config, pick_n(config, n), data_path);
            const BallMode m = ball_mode(mode);
            const int kk = k > 0 ? k : mmle(table_for(config, p));
            const auto draws = draws_for(config, p, m, kk);
            std::ostringstream csv;
            csv << "draw,k";
            for (int j = 1; j <= p.k_cap; ++j) csv << ",theta_" << j;
            csv << '\n';
            for (std::size_t s = 0; s < draws.size(); ++s) {
                csv << s << ',' << draws.k[s];
                for (int j = 0; j < p.k_cap; ++j)
                    csv << ',' << (j < draws.theta[s].size() ? format_double(draws.theta[s][j]) : std::string());
                csv << '\n';
            }
            write_file(g, "posterior_draws.csv", csv.str());
            write_json(g, "sampler.json", {{"mode", to_string(m)}, {"diagnostics", diagnostics_json(draws)}});
        } else if (credible_cmd->parsed()) {
            const Problem p = load_problem(config, pick_n(config, n), data_path);
            const BallMode m = ball_mode(mode);
            const int k_hat = mmle(table_for(config, p));
            const auto draws = draws_for(config, p, m, k_hat);
            const Point center = posterior_center(draws, *p.family);
            const auto ball = build_ball(m, draws, center, *p.family, config.alpha, L, p.data.n(),
                                         m == BallMode::empirical ? std::optional<int>(k_hat) : std::nullopt);
            nlohmann::json j = {{"mode", to_string(m)},
                                {"metric", to_string(ball.metric)},
                                {"alpha", ball.alpha},
                                {"L", L},
                                {"r_alpha", ball.r_alpha},
                                {"inflation", ball.inflation},
                                {"effective_radius", ball.effective_radius()},
                                {"diameter", diameter_proxy(ball)},
                                {"inflated_diameter", inflated_diameter(ball)},
                                {"k_hat", k_hat}};
            if (data_path.empty()) {
                const auto check = covers(ball, p.truth, *p.family);
                j["covered"] = check.covered;
                j["d_truth_center"] = check.distance;
            }
            write_json(g, "credible.json", j);
        } else if (coverage_cmd->parsed()) {
            const auto report = run_coverage(config);
            write_file(g, "coverage_records.csv", report.records_csv());
            write_json(g, "coverage_report.json", report.to_json());
        } else if (negative_cmd->parsed()) {
            const auto report = run_negative(config);
            write_file(g, "negative_records.csv", report.records_csv());
            write_json(g, "negative_report.json", report.to_json());
        } else if (rate_cmd->parsed()) {
            write_json(g, "rate_report.json", run_rate(config).to_json());
        } else if (diagnostics_cmd->parsed()) {
            const auto report = run_diagnostics(config);
            write_file(g, "diagnostics_rows.csv", report.rows_csv());
            write_json(g, "diagnostics_report.json", report.to_json());
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
