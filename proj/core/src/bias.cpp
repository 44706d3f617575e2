#include "sieve/bias.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sieve/error.hpp"
#include "sieve/stats.hpp"

namespace sieve {

BiasProfile::BiasProfile(std::vector<double> values, int n) : values_(std::move(values)), n_(n) {
    if (n < 1) throw InvalidArgument("bias profile needs n >= 1");
    for (double& b : values_) {
        // projections solved to 1e-9 can leave tiny negative rounding
        if (b < 0.0 && b > -1e-14) b = 0.0;
        if (!(b >= 0.0)) throw InvalidArgument("bias values must be non-negative");
    }
    for (int k = 1; k <= k_max(); ++k) {
        if (b(k) <= penalty(k)) {
            k_n_ = k;
            break;
        }
    }
}

double BiasProfile::b(int k) const {
    if (k < 1 || k > k_max())
        throw RangeError("bias at k = " + std::to_string(k) + " outside the profile 1.." +
                         std::to_string(k_max()));
    return values_[static_cast<std::size_t>(k - 1)];
}

double BiasProfile::penalty(int k) const {
    return k * std::log(static_cast<double>(n_)) / n_;
}

double BiasProfile::eps2(int k) const { return b(k) + penalty(k); }

std::string BiasProfile::to_csv() const {
    std::ostringstream out;
    out << "k,b_k,eps2_k\n";
    for (int k = 1; k <= k_max(); ++k)
        out << k << ',' << format_double(b(k)) << ',' << format_double(eps2(k)) << '\n';
    return out.str();
}

nlohmann::json BiasProfile::to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (int k = 1; k <= k_max(); ++k) rows.push_back({{"k", k}, {"b_k", b(k)}, {"eps2_k", eps2(k)}});
    nlohmann::json j{{"n", n_}, {"k_max", k_max()}, {"values", rows}};
    if (k_n_) j["k_n"] = *k_n_;
    else j["k_n"] = "beyond range";
    return j;
}

BiasProfile bias(const TruthSpec& truth, const ModelFamily& family, int k_max, int n) {
    if (k_max < 1) throw InvalidArgument("bias needs k_max >= 1");
    return BiasProfile(family.bias_profile(truth, k_max), n);
}

BiasProfile l2_bias(const TruthSpec& truth, int k_max, int n) {
    if (k_max < 1) throw InvalidArgument("bias needs k_max >= 1");
    const auto& c = truth.coefficients;
    // tail sums from the end for accuracy
    std::vector<double> tail(c.size() + 1, 0.0);
    for (std::size_t i = c.size(); i > 0; --i) tail[i - 1] = tail[i] + c[i - 1] * c[i - 1];
    std::vector<double> values(k_max);
    for (int k = 1; k <= k_max; ++k)
        values[k - 1] = static_cast<std::size_t>(k) < tail.size() ? tail[static_cast<std::size_t>(k)] : 0.0;
    return BiasProfile(std::move(values), n);
}

std::vector<int> tradeoff_set(const BiasProfile& profile, double M) {
    if (!(M >= 1.0)) throw InvalidArgument("trade-off factor M must be >= 1");
    if (!profile.k_n()) throw RangeError("k_n is beyond the bias profile");
    const double bound = M * M * profile.eps2(*profile.k_n());
    std::vector<int> set;
    for (int k = 1; k <= profile.k_max(); ++k)
        if (profile.eps2(k) <= bound) set.push_back(k);
    return set;
}

void PolishedTailParams::validate() const {
    if (R0 < 2) throw InvalidArgument("polished tail needs R0 >= 2");
    if (k0 < 1) throw InvalidArgument("polished tail needs k0 >= 1");
    if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("polished tail needs 0 < tau < 1");
}

PolishedTailReport check_polished_tail(const BiasProfile& profile, const PolishedTailParams& params) {
    params.validate();
    if (!profile.k_n()) throw RangeError("k_n is beyond the bias profile");
    const int kn = *profile.k_n();
    if (static_cast<long>(kn) * params.R0 > profile.k_max())
        throw RangeError("polished tail check needs b up to k_n R0 = " +
                         std::to_string(kn * params.R0));
    PolishedTailReport report;
    for (int k = params.k0; k <= kn; ++k) {
        const double bk = profile.b(k);
        if (bk == 0.0) continue;
        if (!(profile.b(k * params.R0) <= params.tau * bk)) {
            report.holds = false;
            report.first_violation = k;
            break;
        }
    }
    return report;
}

bool check_bias_sandwich(const BiasProfile& profile, double A0, int k0) {
    if (!(A0 > 1.0)) throw InvalidArgument("bias sandwich needs A0 > 1");
    if (k0 < 1) throw InvalidArgument("bias sandwich needs k0 >= 1");
    if (k0 == 1) return true;
    const int hi = static_cast<int>(std::floor(A0 * k0 + 1e-12));
    if (hi > profile.k_max()) throw RangeError("bias sandwich needs b up to A0 k0");
    double smallest = profile.b(k0);
    for (int k = k0; k <= hi; ++k) smallest = std::min(smallest, profile.b(k));
    for (int k = 1; k < k0; ++k)
        if (profile.b(k) < smallest) return false;
    return true;
}

}  // namespace sieve
