#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sieve/family.hpp"
#include "sieve/truth.hpp"

namespace sieve {

/// b(k) for k = 1..k_max in squared-distance units, with the balance index
/// k_n = min{k : b(k) <= k log n / n}.
class BiasProfile {
public:
    BiasProfile() = default;
    /// values[i] is b(i + 1). Throws InvalidArgument on negative entries.
    BiasProfile(std::vector<double> values, int n);

    int n() const { return n_; }
    int k_max() const { return static_cast<int>(values_.size()); }
    double b(int k) const;
    const std::vector<double>& values() const { return values_; }

    /// k log n / n
    double penalty(int k) const;
    /// eps_n^2(k) = b(k) + k log n / n
    double eps2(int k) const;

    /// nullopt when no k <= k_max satisfies the balance inequality.
    std::optional<int> k_n() const { return k_n_; }
    bool k_n_in_range() const { return k_n_.has_value(); }

    std::string to_csv() const;
    nlohmann::json to_json() const;

private:
    std::vector<double> values_;
    int n_ = 1;
    std::optional<int> k_n_;
};

/// b(k) = d^2(theta_0, project(truth, k)) in the family's semi-metric.
BiasProfile bias(const TruthSpec& truth, const ModelFamily& family, int k_max, int n);

/// b(k) = sum_{i>k} theta_{0,i}^2, the exact l2 bias of the sequence.
BiasProfile l2_bias(const TruthSpec& truth, int k_max, int n);

/// K_n(M) = {k : eps_n(k) <= M eps_n(k_n)}. Throws RangeError without k_n.
std::vector<int> tradeoff_set(const BiasProfile& profile, double M);

struct PolishedTailParams {
    int R0 = 2;
    int k0 = 1;
    double tau = 0.5;

    /// Throws InvalidArgument unless R0 >= 2, k0 >= 1, 0 < tau < 1.
    void validate() const;
};

struct PolishedTailReport {
    bool holds = true;
    std::optional<int> first_violation;
};

/// b(k R0) <= tau b(k) for k0 <= k <= k_n; b(k) = 0 passes vacuously.
/// Throws RangeError if k_n R0 exceeds the profile or k_n is out of range.
PolishedTailReport check_polished_tail(const BiasProfile& profile, const PolishedTailParams& params);

/// For all k < k0 there is a k' in [k0, A0 k0] with b(k) >= b(k').
bool check_bias_sandwich(const BiasProfile& profile, double A0, int k0);

}  // namespace sieve
