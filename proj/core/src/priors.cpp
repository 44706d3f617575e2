#include "sieve/priors.hpp"

#include <cmath>
#include <numbers>

#include "sieve/error.hpp"
#include "sieve/rng.hpp"
#include "sieve/stats.hpp"

namespace sieve {

// ---------------------------------------------------------------------------
// HyperPrior

namespace {

std::vector<double> normalize_log(std::vector<double> log_w) {
    const double z = log_sum_exp(log_w);
    for (double& v : log_w) v -= z;
    return log_w;
}

}  // namespace

HyperPrior HyperPrior::geometric(double p, int cap) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("geometric hyperprior needs p in (0,1)");
    if (cap < 1) throw InvalidArgument("hyperprior cap must be >= 1");
    std::vector<double> log_w(cap);
    for (int k = 1; k <= cap; ++k) log_w[k - 1] = std::log(p) + (k - 1) * std::log1p(-p);
    return HyperPrior(Kind::geometric, p, normalize_log(std::move(log_w)));
}

HyperPrior HyperPrior::poisson(double lambda, int cap) {
    if (!(lambda > 0.0)) throw InvalidArgument("poisson hyperprior needs lambda > 0");
    if (cap < 1) throw InvalidArgument("hyperprior cap must be >= 1");
    std::vector<double> log_w(cap);
    for (int k = 1; k <= cap; ++k) log_w[k - 1] = k * std::log(lambda) - lambda - std::lgamma(k + 1.0);
    return HyperPrior(Kind::poisson, lambda, normalize_log(std::move(log_w)));
}

double HyperPrior::log_mass(int k) const {
    if (k < 1 || k > cap())
        throw InvalidArgument("k = " + std::to_string(k) + " outside the hyperprior support 1.." +
                              std::to_string(cap()));
    return log_mass_[static_cast<std::size_t>(k - 1)];
}

HyperPrior::Envelope HyperPrior::envelope() const {
    Envelope env{0.0, 0.0};
    if (cap() >= 2) {
        std::vector<double> ks(cap());
        for (int k = 1; k <= cap(); ++k) ks[k - 1] = k;
        env.c1 = -least_squares_line(ks, log_mass_).slope;
        for (int k = 2; k <= cap(); ++k)
            env.c2 = std::max(env.c2, -log_mass(k) / (k * std::log(static_cast<double>(k))));
    }
    return env;
}

// ---------------------------------------------------------------------------
// ConditionalPrior

ConditionalPrior ConditionalPrior::gaussian(double location, double scale) {
    if (!(scale > 0.0)) throw InvalidArgument("gaussian prior scale must be positive");
    return ConditionalPrior(Kind::gaussian, location, scale);
}

ConditionalPrior ConditionalPrior::laplace(double location, double scale) {
    if (!(scale > 0.0)) throw InvalidArgument("laplace prior scale must be positive");
    return ConditionalPrior(Kind::laplace, location, scale);
}

ConditionalPrior ConditionalPrior::dirichlet(double concentration, double decay) {
    if (!(concentration > 0.0)) throw InvalidArgument("dirichlet concentration must be positive");
    if (!(decay >= 0.0)) throw InvalidArgument("dirichlet decay exponent must be >= 0");
    // location stores the concentration, scale the decay exponent a
    return ConditionalPrior(Kind::dirichlet, concentration, decay);
}

Vector ConditionalPrior::alpha(int k) const {
    if (kind_ != Kind::dirichlet) throw InvalidArgument("alpha() is only defined for Dirichlet priors");
    if (k < 1) throw InvalidArgument("dirichlet needs k >= 1");
    return Vector::Constant(k, location_ * std::pow(static_cast<double>(k), -scale_));
}

double ConditionalPrior::g(double x) const {
    switch (kind_) {
        case Kind::gaussian: {
            const double z = (x - location_) / scale_;
            return std::exp(-0.5 * z * z) / (scale_ * std::sqrt(2.0 * std::numbers::pi));
        }
        case Kind::laplace:
            return std::exp(-std::abs(x - location_) / scale_) / (2.0 * scale_);
        case Kind::dirichlet: break;
    }
    throw InvalidArgument("g() is only defined for product priors");
}

double ConditionalPrior::log_density(const Vector& theta) const {
    const auto k = theta.size();
    if (k < 1) throw InvalidArgument("prior density needs a non-empty parameter");
    switch (kind_) {
        case Kind::gaussian: {
            const double ssq = (theta.array() - location_).square().sum();
            return -0.5 * ssq / (scale_ * scale_) -
                   k * (std::log(scale_) + 0.5 * std::log(2.0 * std::numbers::pi));
        }
        case Kind::laplace:
            return -(theta.array() - location_).abs().sum() / scale_ - k * std::log(2.0 * scale_);
        case Kind::dirichlet: {
            if ((theta.array() < 0.0).any() || std::abs(theta.sum() - 1.0) > 1e-10)
                throw InvalidArgument("Dirichlet density evaluated off the simplex");
            const Vector a = alpha(static_cast<int>(k));
            double total = std::lgamma(a.sum());
            for (Eigen::Index j = 0; j < k; ++j) {
                total -= std::lgamma(a[j]);
                if (a[j] != 1.0) {
                    if (theta[j] == 0.0)
                        return a[j] > 1.0 ? -std::numeric_limits<double>::infinity()
                                          : std::numeric_limits<double>::infinity();
                    total += (a[j] - 1.0) * std::log(theta[j]);
                }
            }
            return total;
        }
    }
    return 0.0;
}

void ConditionalPrior::log_density_derivatives(const Vector& theta, Vector& grad, Matrix& hess) const {
    const auto k = theta.size();
    switch (kind_) {
        case Kind::gaussian:
            grad = -(theta.array() - location_) / (scale_ * scale_);
            hess = Matrix::Identity(k, k) * (-1.0 / (scale_ * scale_));
            return;
        case Kind::laplace:
            grad.resize(k);
            for (Eigen::Index j = 0; j < k; ++j) {
                const double d = theta[j] - location_;
                grad[j] = d > 0 ? -1.0 / scale_ : (d < 0 ? 1.0 / scale_ : 0.0);
            }
            hess = Matrix::Zero(k, k);
            return;
        case Kind::dirichlet: break;
    }
    throw InvalidArgument("derivatives are only defined for product priors");
}

std::vector<Vector> ConditionalPrior::sample(int k, int count, std::uint64_t seed) const {
    if (k < 1) throw InvalidArgument("sample_prior needs k >= 1");
    if (count < 0) throw InvalidArgument("sample_prior needs count >= 0");
    Rng rng = make_rng(seed, 0x7072696f72ULL);
    std::vector<Vector> draws;
    draws.reserve(static_cast<std::size_t>(count));
    switch (kind_) {
        case Kind::gaussian: {
            std::normal_distribution<double> z(0.0, 1.0);
            for (int s = 0; s < count; ++s) {
                Vector v(k);
                for (int j = 0; j < k; ++j) v[j] = location_ + scale_ * z(rng);
                draws.push_back(std::move(v));
            }
            break;
        }
        case Kind::laplace: {
            std::exponential_distribution<double> e(1.0);
            std::bernoulli_distribution sign(0.5);
            for (int s = 0; s < count; ++s) {
                Vector v(k);
                for (int j = 0; j < k; ++j) v[j] = location_ + (sign(rng) ? 1.0 : -1.0) * scale_ * e(rng);
                draws.push_back(std::move(v));
            }
            break;
        }
        case Kind::dirichlet: {
            const Vector a = alpha(k);
            for (int s = 0; s < count; ++s) {
                Vector v(k);
                for (int j = 0; j < k; ++j) v[j] = std::gamma_distribution<double>(a[j], 1.0)(rng);
                v /= v.sum();
                draws.push_back(std::move(v));
            }
            break;
        }
    }
    return draws;
}

ConditionalPrior::TailEnvelope ConditionalPrior::tail_envelope() const {
    const double mu = std::abs(location_);
    switch (kind_) {
        case Kind::gaussian: {
            // (x-mu)^2 <= 2x^2 + 2mu^2 and (x-mu)^2 >= x^2/2 - mu^2
            const double s2 = scale_ * scale_;
            const double norm = 1.0 / (scale_ * std::sqrt(2.0 * std::numbers::pi));
            if (mu == 0.0) return {norm, 0.5 / s2, norm, 0.5 / s2, 2.0};
            return {norm * std::exp(-mu * mu / s2), 1.0 / s2, norm * std::exp(0.5 * mu * mu / s2),
                    0.25 / s2, 2.0};
        }
        case Kind::laplace: {
            const double norm = 1.0 / (2.0 * scale_);
            return {norm * std::exp(-mu / scale_), 1.0 / scale_, norm * std::exp(mu / scale_),
                    1.0 / scale_, 1.0};
        }
        case Kind::dirichlet: break;
    }
    throw InvalidArgument("tail envelope is only defined for product priors");
}

// ---------------------------------------------------------------------------
// SievePriorSpec

int SievePriorSpec::k_cap(int n) const {
    if (n < 1) return 1;
    return std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), k_cap_exponent) - 1e-12)));
}

HyperPrior SievePriorSpec::hyper(int n) const {
    const int cap = k_cap(n);
    return hyper_kind == HyperPrior::Kind::geometric ? HyperPrior::geometric(hyper_parameter, cap)
                                                     : HyperPrior::poisson(hyper_parameter, cap);
}

nlohmann::json SievePriorSpec::to_json() const {
    nlohmann::json hyper_j;
    if (hyper_kind == HyperPrior::Kind::geometric) hyper_j = {{"kind", "geometric"}, {"p", hyper_parameter}};
    else hyper_j = {{"kind", "poisson"}, {"lambda", hyper_parameter}};
    nlohmann::json cond;
    switch (conditional.kind()) {
        case ConditionalPrior::Kind::gaussian:
            cond = {{"kind", "gaussian"}, {"location", conditional.location()}, {"scale", conditional.scale()}};
            break;
        case ConditionalPrior::Kind::laplace:
            cond = {{"kind", "laplace"}, {"location", conditional.location()}, {"scale", conditional.scale()}};
            break;
        case ConditionalPrior::Kind::dirichlet:
            cond = {{"kind", "dirichlet"}, {"concentration", conditional.location()}, {"a", conditional.scale()}};
            break;
    }
    return {{"hyper", hyper_j}, {"conditional", cond}, {"k_cap_exponent", k_cap_exponent}};
}

SievePriorSpec SievePriorSpec::from_json(const nlohmann::json& j) {
    SievePriorSpec spec;
    if (j.contains("hyper")) {
        const auto& h = j.at("hyper");
        const auto kind = h.value("kind", std::string("geometric"));
        if (kind == "geometric") {
            spec.hyper_kind = HyperPrior::Kind::geometric;
            spec.hyper_parameter = h.value("p", 0.5);
        } else if (kind == "poisson") {
            spec.hyper_kind = HyperPrior::Kind::poisson;
            spec.hyper_parameter = h.value("lambda", 1.0);
        } else {
            throw InvalidArgument("unknown hyperprior kind '" + kind + "'");
        }
    }
    if (j.contains("conditional")) {
        const auto& c = j.at("conditional");
        const auto kind = c.value("kind", std::string("gaussian"));
        if (kind == "gaussian") spec.conditional = ConditionalPrior::gaussian(c.value("location", 0.0), c.value("scale", 1.0));
        else if (kind == "laplace") spec.conditional = ConditionalPrior::laplace(c.value("location", 0.0), c.value("scale", 1.0));
        else if (kind == "dirichlet") spec.conditional = ConditionalPrior::dirichlet(c.value("concentration", 1.0), c.value("a", 0.0));
        else throw InvalidArgument("unknown conditional prior kind '" + kind + "'");
    }
    spec.k_cap_exponent = j.value("k_cap_exponent", 0.4);
    if (!(spec.k_cap_exponent > 0.0 && spec.k_cap_exponent < 1.0))
        throw InvalidArgument("k_cap_exponent must lie in (0,1)");
    // validate the hyperprior parameter eagerly
    (void)spec.hyper(1);
    return spec;
}

SievePriorSpec SievePriorSpec::default_for(FamilyKind family) {
    SievePriorSpec spec;
    if (family == FamilyKind::histogram) spec.conditional = ConditionalPrior::dirichlet();
    return spec;
}

}  // namespace sieve
