#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sieve/family.hpp"
#include "sieve/priors.hpp"

namespace sieve {

enum class EvidenceMethod { conjugate_exact, dirichlet_exact, laplace_approx, importance_sampling };

std::string to_string(EvidenceMethod method);

struct EvidenceOptions {
    bool importance_sampling = false;
    int particles = 2048;
    double min_ess = 64.0;
    std::uint64_t seed = 0;
    /// Use the Laplace (or IS) route even when a closed form exists.
    bool force_approximation = false;
};

struct Evidence {
    double log_m = 0.0;
    EvidenceMethod method = EvidenceMethod::conjugate_exact;
    double ess = 0.0;        // importance sampling only
    double std_error = 0.0;  // of log_m, importance sampling only
};

/// log m_n(k) = log int exp(l_n(theta)) pi_|k(theta) dtheta.
///   regression + gaussian g  exact Gaussian evidence
///   histogram + Dirichlet     n log k + log B(alpha + counts) - log B(alpha)
///   otherwise                 Laplace approximation at the posterior mode,
///                             optionally corrected by importance sampling
Evidence marginal_likelihood(const ModelFamily& family, const ConditionalPrior& prior,
                             const Likelihood& likelihood, int k,
                             const EvidenceOptions& options = {});

struct MarginalLikelihoodTable {
    std::vector<double> log_m;  // index k-1
    std::vector<EvidenceMethod> method;
    std::vector<double> ess;

    int k_cap() const { return static_cast<int>(log_m.size()); }
    std::string to_csv() const;
};

MarginalLikelihoodTable marginal_likelihood_table(const ModelFamily& family,
                                                  const ConditionalPrior& prior,
                                                  const Likelihood& likelihood, int k_cap,
                                                  const EvidenceOptions& options = {});

/// argmax_k log m_n(k); ties go to the smallest k.
int mmle(const MarginalLikelihoodTable& table);
int mmle(const std::vector<double>& log_m);

struct KPosterior {
    std::vector<double> log_mass;  // index k-1, normalized

    int cap() const { return static_cast<int>(log_mass.size()); }
    double mass(int k) const;
    int mode() const;
};

/// pi_k(k | Y) proportional to pi_k(k) m_n(k) over the hyperprior support.
KPosterior k_posterior(const MarginalLikelihoodTable& table, const HyperPrior& hyper);
KPosterior k_posterior(const std::vector<double>& log_m, const HyperPrior& hyper);

struct SamplerDiagnostics {
    bool mcmc = false;
    double acceptance_rate = 0.0;
    int chain_length = 0;
    int burn_in = 0;
    double proposal_scale = 0.0;

    nlohmann::json to_json() const;
};

struct PosteriorDraws {
    std::vector<int> k;
    std::vector<Vector> theta;
    std::vector<SamplerDiagnostics> diagnostics;  // one entry per sampled k

    std::size_t size() const { return theta.size(); }
    bool empty() const { return theta.empty(); }
};

struct SamplerOptions {
    int burn_in = 5000;
    double target_acceptance = 0.23;
    /// Chains shorter than this are run to min_chain and thinned evenly, so
    /// small per-k counts in composition sampling still get a usable chain.
    int min_chain = 1000;
    /// Run adaptive Metropolis even when exact conjugate draws are possible.
    bool force_mcmc = false;
};

/// Draws from pi_|k(theta | Y). Exact in the conjugate cases, otherwise
/// random-walk Metropolis preconditioned by the Laplace Hessian with
/// Robbins-Monro scale adaptation during burn-in. Throws SamplerError when
/// the post-adaptation acceptance rate is outside [0.05, 0.6].
PosteriorDraws sample_given_k(const ModelFamily& family, const ConditionalPrior& prior,
                              const Likelihood& likelihood, int k, int count,
                              std::uint64_t seed, const SamplerOptions& options = {});

/// Composition sampling: k ~ pi_k(k|Y), then theta ~ pi_|k(theta|Y).
PosteriorDraws sample_hierarchical(const ModelFamily& family, const ConditionalPrior& prior,
                                   const Likelihood& likelihood, const KPosterior& posterior,
                                   int count, std::uint64_t seed,
                                   const SamplerOptions& options = {});

/// Posterior mean in the family's embedding.
Point posterior_center(const PosteriorDraws& draws, const ModelFamily& family);

/// Posterior mode of l_n + log pi_|k (damped Newton), with the negative Hessian.
struct PosteriorMode {
    Vector theta;
    double log_joint;  // l_n(theta) + log pi(theta)
    Matrix precision;  // -Hessian of log_joint
};
PosteriorMode posterior_mode(const ConditionalPrior& prior, const Likelihood& likelihood, int k);

}  // namespace sieve
