#include "sieve/truth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sieve/error.hpp"
#include "sieve/rng.hpp"

namespace sieve {

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::regression: return "regression";
        case FamilyKind::histogram: return "histogram";
        case FamilyKind::log_linear: return "log_linear";
        case FamilyKind::classification: return "classification";
    }
    return "unknown";
}

FamilyKind family_from_string(const std::string& name) {
    if (name == "regression") return FamilyKind::regression;
    if (name == "histogram") return FamilyKind::histogram;
    if (name == "log_linear" || name == "log-linear" || name == "loglinear")
        return FamilyKind::log_linear;
    if (name == "classification") return FamilyKind::classification;
    throw InvalidArgument("unknown family '" + name + "'");
}

std::string to_string(TruthGenerator gen) {
    switch (gen) {
        case TruthGenerator::sobolev_draw: return "sobolev_draw";
        case TruthGenerator::self_similar: return "self_similar";
        case TruthGenerator::explicit_coefficients: return "explicit";
    }
    return "unknown";
}

TruthGenerator generator_from_string(const std::string& name) {
    if (name == "sobolev_draw" || name == "sobolev") return TruthGenerator::sobolev_draw;
    if (name == "self_similar") return TruthGenerator::self_similar;
    if (name == "explicit") return TruthGenerator::explicit_coefficients;
    throw InvalidArgument("unknown truth generator '" + name + "'");
}

double TruthSpec::sobolev_norm() const {
    double total = 0.0;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const double idx = static_cast<double>(i + 1);
        total += coefficients[i] * coefficients[i] * std::pow(idx, 2.0 * beta);
    }
    return total;
}

bool TruthSpec::is_self_similar() const {
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const double envelope = std::pow(static_cast<double>(i + 1), -beta - 0.5);
        const double a = std::abs(coefficients[i]);
        // relative slack for the rounding in pow
        if (a < envelope / L0 * (1.0 - 1e-12) || a > L0 * envelope * (1.0 + 1e-12)) return false;
    }
    return true;
}

int TruthSpec::support() const {
    for (int i = static_cast<int>(coefficients.size()); i > 0; --i)
        if (coefficients[i - 1] != 0.0) return i;
    return 0;
}

double TruthSpec::series(double x) const {
    return series_value(basis, std::span<const double>(coefficients.data(), support()), x);
}

double histogram_truth_min(const TruthSpec& truth) {
    constexpr int kGrid = 4096;
    double lo = 1.0 + truth.series(0.0);
    for (int i = 0; i <= kGrid; ++i) lo = std::min(lo, 1.0 + truth.series(double(i) / kGrid));
    return lo;
}

namespace {

void scale_for_positive_density(TruthSpec& truth) {
    double l1 = 0.0;
    for (double c : truth.coefficients) l1 += std::abs(c);
    const double sup = std::numbers::sqrt2 * l1;
    if (sup <= 0.5) return;
    const double factor = 0.5 / sup;
    for (double& c : truth.coefficients) c *= factor;
    if (truth.generator == TruthGenerator::self_similar) truth.L0 = std::max(truth.L0, 1.0 / factor);
}

}  // namespace

TruthSpec generate_truth(FamilyKind family, TruthGenerator generator, double beta, double L0,
                         int length, std::uint64_t seed, BasisKind basis) {
    if (!(beta > 0.5)) throw InvalidArgument("truth smoothness beta must exceed 1/2");
    if (!(L0 > 0.0)) throw InvalidArgument("truth radius L0 must be positive");
    if (length < 1) throw InvalidArgument("truth length must be >= 1");
    if (generator == TruthGenerator::explicit_coefficients)
        throw InvalidArgument("explicit truths are built from coefficients, not generated");

    TruthSpec truth;
    truth.family = family;
    truth.generator = generator;
    truth.basis = basis;
    truth.beta = beta;
    truth.L0 = L0;
    truth.coefficients.resize(length);

    Rng rng = make_rng(seed, 0x7472757468ULL);
    std::bernoulli_distribution sign(0.5);
    std::uniform_real_distribution<double> unit(0.5, 1.0);
    for (int i = 0; i < length; ++i) {
        const double idx = i + 1.0;
        const double s = sign(rng) ? 1.0 : -1.0;
        double magnitude = std::pow(idx, -beta - 0.5);
        if (generator == TruthGenerator::sobolev_draw) magnitude *= unit(rng) / std::log(idx + 1.0);
        truth.coefficients[i] = s * magnitude;
    }
    if (generator == TruthGenerator::self_similar) truth.L0 = std::max(L0, 1.0);
    if (generator == TruthGenerator::sobolev_draw) {
        const double factor = std::sqrt(0.9 * L0 / truth.sobolev_norm());
        for (double& c : truth.coefficients) c *= factor;
    }
    if (family == FamilyKind::histogram) scale_for_positive_density(truth);
    return truth;
}

TruthSpec default_histogram_truth() {
    TruthSpec truth;
    truth.family = FamilyKind::histogram;
    truth.generator = TruthGenerator::explicit_coefficients;
    truth.basis = BasisKind::trigonometric;
    truth.beta = 1.0;
    truth.L0 = 1.0;
    // (2 + cos 2 pi x)/2 = 1 + (1/(2 sqrt2)) phi_1
    truth.coefficients = {0.5 / std::numbers::sqrt2};
    return truth;
}

nlohmann::json to_json(const TruthSpec& truth) {
    return {
        {"family", to_string(truth.family)},
        {"generator", to_string(truth.generator)},
        {"basis", to_string(truth.basis)},
        {"beta", truth.beta},
        {"L0", truth.L0},
        {"coefficients", truth.coefficients},
    };
}

TruthSpec truth_from_json(const nlohmann::json& j) {
    TruthSpec truth;
    truth.family = family_from_string(j.at("family").get<std::string>());
    truth.generator = generator_from_string(j.value("generator", std::string("explicit")));
    truth.basis = basis_from_string(j.value("basis", std::string("trigonometric")));
    truth.beta = j.value("beta", 1.0);
    truth.L0 = j.value("L0", 1.0);
    truth.coefficients = j.at("coefficients").get<std::vector<double>>();
    if (truth.family == FamilyKind::histogram && histogram_truth_min(truth) <= 0.0)
        throw InvalidArgument("histogram truth 1 + sum theta_j phi_j is not positive");
    return truth;
}

}  // namespace sieve
