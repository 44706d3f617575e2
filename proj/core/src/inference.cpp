#include "sieve/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sieve/error.hpp"
#include "sieve/optimize.hpp"
#include "sieve/rng.hpp"
#include "sieve/stats.hpp"

namespace sieve {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr std::uint64_t kImportanceStream = 0x69735f70726f70ULL;
constexpr std::uint64_t kSamplerStream = 0x73616d706c6572ULL;

void check_k(int k, int k_max) {
    if (k < 1 || k > k_max)
        throw InvalidArgument("model dimension k = " + std::to_string(k) + " outside 1.." +
                              std::to_string(k_max));
}

double log_beta(const Vector& a) {
    double s = -std::lgamma(a.sum());
    for (Eigen::Index j = 0; j < a.size(); ++j) s += std::lgamma(a[j]);
    return s;
}

const HistogramLikelihood& as_histogram(const Likelihood& likelihood) {
    const auto* h = dynamic_cast<const HistogramLikelihood*>(&likelihood);
    if (!h) throw InvalidArgument("histogram family needs a histogram likelihood");
    return *h;
}

const RegressionLikelihood& as_regression(const Likelihood& likelihood) {
    const auto* r = dynamic_cast<const RegressionLikelihood*>(&likelihood);
    if (!r) throw InvalidArgument("regression family needs a regression likelihood");
    return *r;
}

bool has_exact_evidence(const ModelFamily& family, const ConditionalPrior& prior) {
    return (family.kind() == FamilyKind::regression && prior.kind() == ConditionalPrior::Kind::gaussian) ||
           (family.kind() == FamilyKind::histogram && prior.kind() == ConditionalPrior::Kind::dirichlet);
}

void check_prior(const ModelFamily& family, const ConditionalPrior& prior) {
    const bool simplex = family.kind() == FamilyKind::histogram;
    if (simplex != !prior.is_product())
        throw InvalidArgument(simplex ? "histogram family needs a Dirichlet prior"
                                      : "Dirichlet priors are only defined for the histogram family");
}

// Conjugate Gaussian posterior N(P^-1 b, P^-1) for regression with g = N(mu, s^2).
struct GaussianPosterior {
    Eigen::LLT<Matrix> precision;
    Vector mean;
    Vector b;
};

GaussianPosterior gaussian_posterior(const RegressionLikelihood& lik, const ConditionalPrior& prior, int k) {
    const double s2 = prior.scale() * prior.scale();
    Matrix p = lik.cross().topLeftCorner(k, k);
    p.diagonal().array() += 1.0 / s2;
    GaussianPosterior post{Eigen::LLT<Matrix>(p), Vector(), Vector()};
    if (post.precision.info() != Eigen::Success) throw SingularDesign("posterior precision is not positive definite");
    post.b = lik.projected_y().head(k) + Vector::Constant(k, prior.location() / s2);
    post.mean = post.precision.solve(post.b);
    return post;
}

double regression_exact(const RegressionLikelihood& lik, const ConditionalPrior& prior, int k) {
    const auto post = gaussian_posterior(lik, prior, k);
    const Matrix& l = post.precision.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    const double s = prior.scale();
    const double quad = lik.y_squared() + k * prior.location() * prior.location() / (s * s) - post.b.dot(post.mean);
    return -0.5 * lik.n() * kLog2Pi - k * std::log(s) - 0.5 * log_det - 0.5 * quad;
}

double dirichlet_exact(const HistogramLikelihood& lik, const ConditionalPrior& prior, int k) {
    const auto counts = lik.counts(k);
    const Vector alpha = prior.alpha(k);
    Vector post = alpha;
    for (int j = 0; j < k; ++j) post[j] += counts[j];
    return lik.n() * std::log(static_cast<double>(k)) + log_beta(post) - log_beta(alpha);
}

// Log target and a Gaussian approximation in unconstrained coordinates.
struct LaplaceFit {
    Vector mode;
    Matrix precision;
    double log_target_at_mode;
    std::function<double(const Vector&)> log_target;
};

// Histogram: additive log-ratio coordinates eta in R^(k-1), theta = softmax(eta, 0).
// With the Jacobian prod theta_j the integrand is
//   k^n / B(alpha) prod theta_j^(alpha_j + n_j).
LaplaceFit histogram_fit(const HistogramLikelihood& lik, const ConditionalPrior& prior, int k) {
    const auto counts = lik.counts(k);
    const Vector alpha = prior.alpha(k);
    Vector a = alpha;
    for (int j = 0; j < k; ++j) a[j] += counts[j];
    const double total = a.sum();
    const double shift = lik.n() * std::log(static_cast<double>(k)) - log_beta(alpha);
    auto log_target = [a, shift, k](const Vector& eta) {
        double mx = 0.0;
        for (int j = 0; j < k - 1; ++j) mx = std::max(mx, eta[j]);
        double z = std::exp(-mx);
        for (int j = 0; j < k - 1; ++j) z += std::exp(eta[j] - mx);
        const double log_z = mx + std::log(z);
        double s = shift - a[k - 1] * log_z;
        for (int j = 0; j < k - 1; ++j) s += a[j] * (eta[j] - log_z);
        return s;
    };
    LaplaceFit fit;
    fit.mode.resize(k - 1);
    const Vector theta = a / total;
    for (int j = 0; j < k - 1; ++j) fit.mode[j] = std::log(a[j] / a[k - 1]);
    const Vector t = theta.head(k - 1);
    fit.precision = total * (Matrix(t.asDiagonal()) - t * t.transpose());
    fit.log_target = log_target;
    fit.log_target_at_mode = log_target(fit.mode);
    return fit;
}

double gaussian_log_normalizer(const Matrix& precision, double log_target_at_mode) {
    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success) throw ConvergenceError("Laplace precision is not positive definite", 0.0);
    const Matrix& l = llt.matrixL();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    return log_target_at_mode + 0.5 * precision.rows() * kLog2Pi - 0.5 * log_det;
}

LaplaceFit smooth_fit(const ConditionalPrior& prior, const Likelihood& lik, int k) {
    auto mode = posterior_mode(prior, lik, k);
    LaplaceFit fit;
    fit.mode = std::move(mode.theta);
    fit.precision = std::move(mode.precision);
    fit.log_target_at_mode = mode.log_joint;
    fit.log_target = [&prior, &lik](const Vector& theta) { return lik.value(theta) + prior.log_density(theta); };
    return fit;
}

// Importance sampling with N(mode, scale^2 precision^-1).
Evidence importance_sample(const LaplaceFit& fit, const EvidenceOptions& options, int k) {
    if (options.particles < 2) throw InvalidArgument("importance sampling needs at least 2 particles");
    const auto d = fit.mode.size();
    Eigen::LLT<Matrix> llt(fit.precision);
    if (llt.info() != Eigen::Success) throw ConvergenceError("Laplace precision is not positive definite", 0.0);
    const Matrix& l = llt.matrixL();
    const double log_det_prec = 2.0 * l.diagonal().array().log().sum();

    Evidence best;
    for (const double scale : {1.2, 2.0}) {
        Rng rng = make_rng(options.seed, mix_seed(kImportanceStream, static_cast<std::uint64_t>(k)));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> log_w(static_cast<std::size_t>(options.particles));
        const double log_q_norm = -0.5 * d * kLog2Pi - d * std::log(scale) + 0.5 * log_det_prec;
        Vector z(d);
        for (auto& w : log_w) {
            for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
            // x = mode + scale * L^-T z has precision L L^T / scale^2
            const Vector x = fit.mode + scale * l.transpose().triangularView<Eigen::Upper>().solve(z);
            w = fit.log_target(x) - (log_q_norm - 0.5 * z.squaredNorm());
            if (std::isnan(w)) w = -std::numeric_limits<double>::infinity();
        }
        const double mx = *std::max_element(log_w.begin(), log_w.end());
        if (!std::isfinite(mx)) throw ConvergenceError("importance weights are all zero", 0.0);
        double s1 = 0.0, s2 = 0.0;
        for (double w : log_w) {
            const double e = std::exp(w - mx);
            s1 += e;
            s2 += e * e;
        }
        const double count = static_cast<double>(options.particles);
        const double mean_w = s1 / count;
        const double var_w = std::max(0.0, (s2 - count * mean_w * mean_w) / (count - 1.0));
        Evidence ev;
        ev.method = EvidenceMethod::importance_sampling;
        ev.log_m = mx + std::log(mean_w);
        ev.ess = s1 * s1 / s2;
        ev.std_error = std::sqrt(var_w / count) / mean_w;
        if (ev.ess >= options.min_ess) return ev;
        best = ev;
    }
    throw ConvergenceError("importance sampling ESS " + format_double(best.ess) + " below the floor " +
                               format_double(options.min_ess) + " after a proposal-scale retry",
                           0.0);
}

}  // namespace

std::string to_string(EvidenceMethod method) {
    switch (method) {
        case EvidenceMethod::conjugate_exact: return "conjugate_exact";
        case EvidenceMethod::dirichlet_exact: return "dirichlet_exact";
        case EvidenceMethod::laplace_approx: return "laplace_approx";
        case EvidenceMethod::importance_sampling: return "importance_sampling";
    }
    return "unknown";
}

Evidence marginal_likelihood(const ModelFamily& family, const ConditionalPrior& prior,
                             const Likelihood& likelihood, int k, const EvidenceOptions& options) {
    check_k(k, family.k_max());
    check_prior(family, prior);
    const bool exact = has_exact_evidence(family, prior) && !options.force_approximation;
    Evidence ev;
    if (exact) {
        ev.method = family.kind() == FamilyKind::regression ? EvidenceMethod::conjugate_exact
                                                            : EvidenceMethod::dirichlet_exact;
    } else {
        ev.method = options.importance_sampling ? EvidenceMethod::importance_sampling
                                                : EvidenceMethod::laplace_approx;
    }
    if (likelihood.n() == 0) return ev;  // empty product: m = 1

    if (exact) {
        ev.log_m = family.kind() == FamilyKind::regression
                       ? regression_exact(as_regression(likelihood), prior, k)
                       : dirichlet_exact(as_histogram(likelihood), prior, k);
        return ev;
    }

    if (family.kind() == FamilyKind::histogram && k == 1) {
        ev.log_m = 0.0;  // Theta(1) is a single point, the uniform density
        return ev;
    }
    const LaplaceFit fit = family.kind() == FamilyKind::histogram
                               ? histogram_fit(as_histogram(likelihood), prior, k)
                               : smooth_fit(prior, likelihood, k);
    if (options.importance_sampling) return importance_sample(fit, options, k);
    ev.log_m = gaussian_log_normalizer(fit.precision, fit.log_target_at_mode);
    return ev;
}

std::string MarginalLikelihoodTable::to_csv() const {
    std::ostringstream out;
    out << "k,log_m,method,ess\n";
    for (int k = 1; k <= k_cap(); ++k) {
        const auto i = static_cast<std::size_t>(k - 1);
        out << k << ',' << format_double(log_m[i]) << ',' << to_string(method[i]) << ','
            << format_double(ess[i]) << '\n';
    }
    return out.str();
}

MarginalLikelihoodTable marginal_likelihood_table(const ModelFamily& family, const ConditionalPrior& prior,
                                                  const Likelihood& likelihood, int k_cap,
                                                  const EvidenceOptions& options) {
    if (k_cap < 1) throw InvalidArgument("marginal likelihood table needs k_cap >= 1");
    check_k(k_cap, family.k_max());
    MarginalLikelihoodTable table;
    table.log_m.reserve(k_cap);
    for (int k = 1; k <= k_cap; ++k) {
        const Evidence ev = marginal_likelihood(family, prior, likelihood, k, options);
        if (!std::isfinite(ev.log_m))
            throw ConvergenceError("non-finite log marginal likelihood at k = " + std::to_string(k), 0.0);
        table.log_m.push_back(ev.log_m);
        table.method.push_back(ev.method);
        table.ess.push_back(ev.ess);
    }
    return table;
}

int mmle(const MarginalLikelihoodTable& table) { return mmle(table.log_m); }

int mmle(const std::vector<double>& log_m) {
    if (log_m.empty()) throw InvalidArgument("mmle needs a non-empty table");
    int best = 1;
    for (int k = 2; k <= static_cast<int>(log_m.size()); ++k)
        if (log_m[k - 1] > log_m[best - 1]) best = k;
    return best;
}

double KPosterior::mass(int k) const {
    if (k < 1 || k > cap()) return 0.0;
    return std::exp(log_mass[static_cast<std::size_t>(k - 1)]);
}

int KPosterior::mode() const { return mmle(log_mass); }

KPosterior k_posterior(const MarginalLikelihoodTable& table, const HyperPrior& hyper) {
    return k_posterior(table.log_m, hyper);
}

KPosterior k_posterior(const std::vector<double>& log_m, const HyperPrior& hyper) {
    if (static_cast<int>(log_m.size()) < hyper.cap())
        throw InvalidArgument("marginal likelihood table shorter than the hyperprior support");
    KPosterior post;
    post.log_mass.resize(hyper.cap());
    for (int k = 1; k <= hyper.cap(); ++k) post.log_mass[k - 1] = hyper.log_mass(k) + log_m[k - 1];
    const double z = log_sum_exp(post.log_mass);
    for (double& v : post.log_mass) v -= z;
    return post;
}

nlohmann::json SamplerDiagnostics::to_json() const {
    return {{"mcmc", mcmc},
            {"acceptance_rate", acceptance_rate},
            {"chain_length", chain_length},
            {"burn_in", burn_in},
            {"proposal_scale", proposal_scale}};
}

// ---------------------------------------------------------------------------
// Posterior mode

namespace {

// Proximal Newton for -l_n(theta) + |theta - mu|_1 / b: each quadratic model
// is minimized by coordinate descent, then a backtracking step on the full
// objective.
PosteriorMode laplace_mode(const ConditionalPrior& prior, const Likelihood& lik, int k) {
    const double mu = prior.location();
    const double lam = 1.0 / prior.scale();
    auto objective = [&](const Vector& t) { return -(lik.value(t) + prior.log_density(t)); };
    Vector theta = Vector::Constant(k, mu);
    Vector grad;
    Matrix hess;
    double f = objective(theta);
    for (int iter = 0; iter < 200; ++iter) {
        lik.derivatives(theta, &grad, &hess);
        const Vector g = -grad;
        Matrix h = -hess;
        h.diagonal().array() += 1e-10 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
        // minimize g.d + d'Hd/2 + lam |theta + d - mu|_1 over d
        Vector u = theta;  // u = theta + d
        for (int sweep = 0; sweep < 500; ++sweep) {
            double change = 0.0;
            for (int j = 0; j < k; ++j) {
                const double hjj = h(j, j);
                // gradient of the quadratic part at u, excluding coordinate j's diagonal term
                const double r = g[j] + h.row(j).dot(u - theta) - hjj * (u[j] - theta[j]);
                const double z = theta[j] - r / hjj - mu;
                const double t = (z > lam / hjj ? z - lam / hjj : (z < -lam / hjj ? z + lam / hjj : 0.0)) + mu;
                change = std::max(change, std::abs(t - u[j]));
                u[j] = t;
            }
            if (change < 1e-14 * (1.0 + u.cwiseAbs().maxCoeff())) break;
        }
        const Vector d = u - theta;
        if (d.cwiseAbs().maxCoeff() < 1e-13 * (1.0 + theta.cwiseAbs().maxCoeff())) break;
        double step = 1.0;
        double f_new = objective(theta + d);
        int halvings = 0;
        while (!(f_new <= f) && halvings < 60) {
            step *= 0.5;
            f_new = objective(theta + step * d);
            ++halvings;
        }
        if (!(f_new <= f)) break;
        theta += step * d;
        const double drop = f - f_new;
        f = f_new;
        if (drop <= 1e-15 * std::max(1.0, std::abs(f)) && step == 1.0) break;
    }
    lik.derivatives(theta, &grad, &hess);
    return PosteriorMode{theta, -f, -hess};
}

}  // namespace

PosteriorMode posterior_mode(const ConditionalPrior& prior, const Likelihood& likelihood, int k) {
    if (k < 1) throw InvalidArgument("posterior mode needs k >= 1");
    if (!prior.is_product() || !likelihood.smooth())
        throw InvalidArgument("posterior_mode needs a smooth likelihood and a product prior");
    if (prior.kind() == ConditionalPrior::Kind::laplace) return laplace_mode(prior, likelihood, k);
    ConvexObjective objective = [&](const Vector& theta, Vector* grad, Matrix* hess) {
        if (!grad && !hess) return -(likelihood.value(theta) + prior.log_density(theta));
        Vector gl, gp;
        Matrix hl, hp;
        const double v = likelihood.derivatives(theta, &gl, &hl);
        prior.log_density_derivatives(theta, gp, hp);
        if (grad) *grad = -(gl + gp);
        if (hess) *hess = -(hl + hp);
        return -(v + prior.log_density(theta));
    };
    const auto result = minimize_newton(objective, Vector::Constant(k, prior.location()));
    return PosteriorMode{result.x, -result.value, result.hessian};
}

// ---------------------------------------------------------------------------
// Samplers

namespace {

PosteriorDraws metropolis(const ModelFamily& family, const ConditionalPrior& prior, const Likelihood& lik,
                          int k, int count, std::uint64_t seed, const SamplerOptions& options) {
    if (family.kind() == FamilyKind::histogram)
        throw InvalidArgument("the histogram family is sampled exactly from its Dirichlet posterior");
    if (options.burn_in < 0) throw InvalidArgument("burn_in must be >= 0");
    if (options.min_chain < 0) throw InvalidArgument("min_chain must be >= 0");
    const auto mode = posterior_mode(prior, lik, k);
    Matrix precision = mode.precision;
    Eigen::LLT<Matrix> llt(precision);
    if (llt.info() != Eigen::Success) {
        // flat directions (e.g. laplace g with no data) fall back to the prior scale
        precision.diagonal().array() += 1.0 / (prior.scale() * prior.scale());
        llt.compute(precision);
        if (llt.info() != Eigen::Success) throw SamplerError("mode Hessian is not positive definite");
    }
    const Matrix upper = llt.matrixU();

    Rng rng = make_rng(seed, mix_seed(kSamplerStream, static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto log_target = [&](const Vector& t) { return lik.value(t) + prior.log_density(t); };

    Vector current = mode.theta;
    double current_lp = log_target(current);
    double log_scale = std::log(2.38 / std::sqrt(static_cast<double>(k)));
    Vector z(k);
    auto step = [&](double& accept_prob) {
        for (int j = 0; j < k; ++j) z[j] = normal(rng);
        const Vector proposal = current + std::exp(log_scale) * upper.triangularView<Eigen::Upper>().solve(z);
        const double lp = log_target(proposal);
        accept_prob = std::isfinite(lp) ? std::min(1.0, std::exp(lp - current_lp)) : 0.0;
        if (unif(rng) < accept_prob) {
            current = proposal;
            current_lp = lp;
            return true;
        }
        return false;
    };

    double a = 0.0;
    for (int t = 0; t < options.burn_in; ++t) {
        step(a);
        log_scale += (a - options.target_acceptance) / std::pow(t + 1.0, 0.6);
    }
    const int length = std::max(count, options.min_chain);
    PosteriorDraws draws;
    draws.k.assign(static_cast<std::size_t>(count), k);
    draws.theta.reserve(static_cast<std::size_t>(count));
    int accepted = 0;
    std::size_t next_keep = 0;
    for (int t = 0; t < length; ++t) {
        accepted += step(a);
        // keep draw i at chain position floor((i + 1) length / count) - 1
        while (next_keep < static_cast<std::size_t>(count) &&
               static_cast<long long>(t + 1) * count >= static_cast<long long>(next_keep + 1) * length) {
            draws.theta.push_back(current);
            ++next_keep;
        }
    }
    SamplerDiagnostics diag;
    diag.mcmc = true;
    diag.chain_length = length;
    diag.burn_in = options.burn_in;
    diag.proposal_scale = std::exp(log_scale);
    diag.acceptance_rate = length > 0 ? static_cast<double>(accepted) / length : 0.0;
    if (length > 0 && (diag.acceptance_rate < 0.05 || diag.acceptance_rate > 0.6))
        throw SamplerError("Metropolis acceptance rate " + format_double(diag.acceptance_rate) + " at k = " +
                           std::to_string(k) + " outside [0.05, 0.6]");
    draws.diagnostics.push_back(diag);
    return draws;
}

}  // namespace

PosteriorDraws sample_given_k(const ModelFamily& family, const ConditionalPrior& prior,
                              const Likelihood& likelihood, int k, int count, std::uint64_t seed,
                              const SamplerOptions& options) {
    check_k(k, family.k_max());
    check_prior(family, prior);
    if (count < 0) throw InvalidArgument("sample count must be >= 0");
    const bool exact = has_exact_evidence(family, prior) && !options.force_mcmc;
    if (!exact) return metropolis(family, prior, likelihood, k, count, seed, options);

    PosteriorDraws draws;
    draws.k.assign(static_cast<std::size_t>(count), k);
    draws.theta.reserve(static_cast<std::size_t>(count));
    draws.diagnostics.push_back(SamplerDiagnostics{});
    draws.diagnostics.back().chain_length = count;
    Rng rng = make_rng(seed, mix_seed(kSamplerStream, static_cast<std::uint64_t>(k)));
    if (family.kind() == FamilyKind::regression) {
        const auto post = gaussian_posterior(as_regression(likelihood), prior, k);
        const Matrix upper = post.precision.matrixU();
        std::normal_distribution<double> normal(0.0, 1.0);
        Vector z(k);
        for (int s = 0; s < count; ++s) {
            for (int j = 0; j < k; ++j) z[j] = normal(rng);
            draws.theta.push_back(post.mean + upper.triangularView<Eigen::Upper>().solve(z));
        }
    } else {
        const auto counts = as_histogram(likelihood).counts(k);
        Vector a = prior.alpha(k);
        for (int j = 0; j < k; ++j) a[j] += counts[j];
        std::vector<std::gamma_distribution<double>> gammas;
        for (int j = 0; j < k; ++j) gammas.emplace_back(a[j], 1.0);
        for (int s = 0; s < count; ++s) {
            Vector v(k);
            for (int j = 0; j < k; ++j) v[j] = gammas[j](rng);
            v /= v.sum();
            draws.theta.push_back(std::move(v));
        }
    }
    return draws;
}

PosteriorDraws sample_hierarchical(const ModelFamily& family, const ConditionalPrior& prior,
                                   const Likelihood& likelihood, const KPosterior& posterior, int count,
                                   std::uint64_t seed, const SamplerOptions& options) {
    if (posterior.cap() < 1) throw InvalidArgument("empty k posterior");
    if (count < 0) throw InvalidArgument("sample count must be >= 0");
    Rng rng = make_rng(seed, kSamplerStream);
    std::vector<double> weights(posterior.cap());
    for (int k = 1; k <= posterior.cap(); ++k) weights[k - 1] = posterior.mass(k);
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    std::vector<int> per_k(posterior.cap(), 0);
    std::vector<int> order(static_cast<std::size_t>(count));
    for (auto& o : order) {
        o = pick(rng) + 1;
        ++per_k[o - 1];
    }
    // draws for each k, consumed in the sampled order
    std::vector<PosteriorDraws> blocks(posterior.cap());
    PosteriorDraws out;
    for (int k = 1; k <= posterior.cap(); ++k) {
        if (per_k[k - 1] == 0) continue;
        blocks[k - 1] = sample_given_k(family, prior, likelihood, k, per_k[k - 1], mix_seed(seed, k), options);
        for (auto& d : blocks[k - 1].diagnostics) out.diagnostics.push_back(d);
    }
    std::vector<std::size_t> used(posterior.cap(), 0);
    out.k.reserve(order.size());
    out.theta.reserve(order.size());
    for (int k : order) {
        out.k.push_back(k);
        out.theta.push_back(std::move(blocks[k - 1].theta[used[k - 1]++]));
    }
    return out;
}

Point posterior_center(const PosteriorDraws& draws, const ModelFamily& family) {
    if (draws.empty()) throw InvalidArgument("posterior_center needs at least one draw");
    std::vector<Point> points;
    points.reserve(draws.size());
    for (const auto& t : draws.theta) points.push_back(family.embed(t));
    return family.average(points);
}

}  // namespace sieve
