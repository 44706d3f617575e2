#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sieve/basis.hpp"

namespace sieve {

enum class FamilyKind { regression, histogram, log_linear, classification };

std::string to_string(FamilyKind kind);
FamilyKind family_from_string(const std::string& name);

enum class TruthGenerator { sobolev_draw, self_similar, explicit_coefficients };

std::string to_string(TruthGenerator gen);
TruthGenerator generator_from_string(const std::string& name);

/// A truncated coefficient sequence theta_0 (trailing entries are exactly zero)
/// and the family whose observable it parameterizes:
///   regression      f_0 = sum theta_j phi_j
///   histogram       p_0 = 1 + sum theta_j phi_j (must stay positive)
///   log_linear      f_0 = exp(sum theta_j phi_j - c(theta_0))
///   classification  q_0 = logistic(sum theta_j phi_j)
struct TruthSpec {
    FamilyKind family = FamilyKind::regression;
    TruthGenerator generator = TruthGenerator::explicit_coefficients;
    BasisKind basis = BasisKind::trigonometric;
    double beta = 1.0;
    double L0 = 1.0;
    std::vector<double> coefficients;

    /// sum theta_i^2 i^(2 beta)
    double sobolev_norm() const;
    /// L0^-1 i^(-beta-1/2) <= |theta_i| <= L0 i^(-beta-1/2) for every stored i.
    bool is_self_similar() const;
    /// sum theta_j phi_j(x)
    double series(double x) const;
    /// Index of the last nonzero coefficient (0 for the zero sequence).
    int support() const;
};

inline constexpr int kDefaultTruthLength = 4096;

/// self_similar: theta_i = s_i i^(-beta-1/2) with random signs.
/// sobolev_draw: theta_i = s_i u_i i^(-beta-1/2) / log(i+1), u_i ~ U(1/2,1),
///               rescaled so that sobolev_norm() == 0.9 L0.
/// For the histogram family the draw is scaled so that p_0 >= 1/2.
/// Throws InvalidArgument for beta <= 1/2.
TruthSpec generate_truth(FamilyKind family, TruthGenerator generator, double beta, double L0,
                         int length, std::uint64_t seed,
                         BasisKind basis = BasisKind::trigonometric);

/// p_0(x) = (2 + cos 2 pi x) / 2, the default histogram truth.
TruthSpec default_histogram_truth();

/// Lower bound of p_0 = 1 + series on a fine grid (histogram truths).
double histogram_truth_min(const TruthSpec& truth);

nlohmann::json to_json(const TruthSpec& truth);
TruthSpec truth_from_json(const nlohmann::json& j);

}  // namespace sieve
