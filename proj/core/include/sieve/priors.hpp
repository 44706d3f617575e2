#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sieve/family.hpp"

namespace sieve {

/// Prior on k renormalized over {1, ..., cap}.
class HyperPrior {
public:
    enum class Kind { geometric, poisson };

    static HyperPrior geometric(double p, int cap);
    static HyperPrior poisson(double lambda, int cap);

    Kind kind() const { return kind_; }
    double parameter() const { return parameter_; }
    int cap() const { return static_cast<int>(log_mass_.size()); }

    /// log pi_k(k). Throws InvalidArgument outside {1, ..., cap}.
    double log_mass(int k) const;

    /// Envelope exp(-c2 k log k) <~ pi_k(k) <~ exp(-c1 k) of condition H.
    /// c1 is minus the least-squares slope of log pi_k(k) against k; c2 is
    /// the largest -log pi_k(k)/(k log k) over k >= 2 (0 when cap < 2).
    struct Envelope {
        double c1;
        double c2;
    };
    Envelope envelope() const;

private:
    HyperPrior(Kind kind, double parameter, std::vector<double> log_mass)
        : kind_(kind), parameter_(parameter), log_mass_(std::move(log_mass)) {}

    Kind kind_;
    double parameter_;
    std::vector<double> log_mass_;
};

/// pi_|k: iid g per coordinate, or a Dirichlet on the simplex.
class ConditionalPrior {
public:
    enum class Kind { gaussian, laplace, dirichlet };

    static ConditionalPrior gaussian(double location = 0.0, double scale = 1.0);
    static ConditionalPrior laplace(double location = 0.0, double scale = 1.0);
    /// alpha_{j,k} = concentration * k^(-decay).
    static ConditionalPrior dirichlet(double concentration = 1.0, double decay = 0.0);

    Kind kind() const { return kind_; }
    double location() const { return location_; }
    double scale() const { return scale_; }
    bool is_product() const { return kind_ != Kind::dirichlet; }

    /// Dirichlet parameters (alpha_{1,k}, ..., alpha_{k,k}).
    Vector alpha(int k) const;

    /// Throws InvalidArgument off the simplex for the Dirichlet (tolerance 1e-10).
    double log_density(const Vector& theta) const;
    /// Gradient and Hessian of log_density for product priors (laplace: a.e.).
    void log_density_derivatives(const Vector& theta, Vector& grad, Matrix& hess) const;

    std::vector<Vector> sample(int k, int count, std::uint64_t seed) const;

    /// G1 exp(-G2 |x|^q) <= g(x) <= G3 exp(-G4 |x|^q) for product priors.
    struct TailEnvelope {
        double G1, G2, G3, G4;
        double q;
    };
    TailEnvelope tail_envelope() const;

    /// Density of one coordinate (product priors).
    double g(double x) const;

private:
    ConditionalPrior(Kind kind, double location, double scale)
        : kind_(kind), location_(location), scale_(scale) {}

    Kind kind_;
    double location_;
    double scale_;
};

/// Full sieve prior configuration; the hyperprior cap depends on n.
struct SievePriorSpec {
    HyperPrior::Kind hyper_kind = HyperPrior::Kind::geometric;
    double hyper_parameter = 0.5;
    ConditionalPrior conditional = ConditionalPrior::gaussian();
    double k_cap_exponent = 0.4;

    /// ceil(n^k_cap_exponent), at least 1.
    int k_cap(int n) const;
    HyperPrior hyper(int n) const;

    nlohmann::json to_json() const;
    static SievePriorSpec from_json(const nlohmann::json& j);
    /// Dirichlet for histograms, the configured g otherwise.
    static SievePriorSpec default_for(FamilyKind family);
};

}  // namespace sieve
