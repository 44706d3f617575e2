#include "sieve/credible.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sieve/error.hpp"
#include "sieve/stats.hpp"

namespace sieve {

std::string to_string(BallMode mode) {
    return mode == BallMode::hierarchical ? "hierarchical" : "empirical";
}

double credible_radius(std::span<const double> distances, double alpha) {
    if (distances.empty()) throw InvalidArgument("credible_radius needs at least one draw");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    std::vector<double> d(distances.begin(), distances.end());
    const auto s = static_cast<double>(d.size());
    // guard against (1 - alpha) S landing a hair above an integer
    const auto rank = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((1.0 - alpha) * s - 1e-9)),
                                              1, d.size());
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(rank - 1), d.end());
    return d[rank - 1];
}

std::vector<double> draw_distances(const PosteriorDraws& draws, const Point& center, const ModelFamily& family) {
    std::vector<double> d;
    d.reserve(draws.size());
    for (const auto& t : draws.theta) d.push_back(family.metric().distance(family.embed(t), center));
    return d;
}

double credible_radius(const PosteriorDraws& draws, const Point& center, const ModelFamily& family,
                       double alpha) {
    const auto d = draw_distances(draws, center, family);
    return credible_radius(d, alpha);
}

double inflation_factor(double L, int n) {
    if (!(L > 0.0)) throw InvalidArgument("inflation constant L must be positive");
    if (n < 2) throw InvalidArgument("inflation needs n >= 2");
    return L * std::sqrt(std::log(static_cast<double>(n)));
}

CredibleBall build_ball(BallMode mode, const PosteriorDraws& draws, const Point& center,
                        const ModelFamily& family, double alpha, double L, int n, std::optional<int> k_hat) {
    if (mode == BallMode::empirical) {
        if (!k_hat) throw InvalidArgument("empirical-Bayes ball needs k_hat");
        for (int k : draws.k)
            if (k != *k_hat)
                throw InvalidArgument("draw with k = " + std::to_string(k) + " in an empirical ball at k_hat = " +
                                      std::to_string(*k_hat));
    }
    CredibleBall ball;
    ball.center = center;
    ball.r_alpha = credible_radius(draws, center, family, alpha);
    ball.inflation = inflation_factor(L, n);
    ball.alpha = alpha;
    ball.metric = family.metric().kind();
    ball.mode = mode;
    ball.k_hat = k_hat;
    return ball;
}

CoverageCheck covers(const CredibleBall& ball, const TruthSpec& truth, const ModelFamily& family) {
    return covers(ball, family.embed_truth(truth), family);
}

CoverageCheck covers(const CredibleBall& ball, const Point& truth_point, const ModelFamily& family) {
    if (ball.metric != family.metric().kind())
        throw InvalidArgument("ball metric " + to_string(ball.metric) + " does not match the family metric " +
                              to_string(family.metric().kind()));
    const double d = family.metric().distance(truth_point, ball.center);
    return {d <= ball.effective_radius(), d};
}

double diameter_proxy(const CredibleBall& ball) { return 2.0 * ball.r_alpha; }

double inflated_diameter(const CredibleBall& ball) { return 2.0 * ball.effective_radius(); }

std::string coverage_csv_header() { return "replicate_id,covered,d_truth_center,r_alpha,inflation,k_hat,diameter"; }

std::string to_csv_row(const CoverageRecord& r) {
    std::ostringstream out;
    out << r.replicate_id << ',' << (r.covered ? 1 : 0) << ',' << format_double(r.d_truth_center) << ','
        << format_double(r.r_alpha) << ',' << format_double(r.inflation) << ',' << r.k_hat << ','
        << format_double(r.diameter);
    return out.str();
}

}  // namespace sieve
