#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sieve/family.hpp"
#include "sieve/inference.hpp"

namespace sieve {

enum class BallMode { hierarchical, empirical };

std::string to_string(BallMode mode);

struct CredibleBall {
    Point center;
    double r_alpha = 0.0;
    double inflation = 1.0;
    double alpha = 0.05;
    MetricKind metric = MetricKind::l2;
    BallMode mode = BallMode::hierarchical;
    std::optional<int> k_hat;

    double effective_radius() const { return inflation * r_alpha; }
};

/// Smallest order statistic of the distances with rank >= ceil((1 - alpha) S).
double credible_radius(std::span<const double> distances, double alpha);

/// Distances d(theta_s, center) in the family metric.
std::vector<double> draw_distances(const PosteriorDraws& draws, const Point& center,
                                   const ModelFamily& family);

double credible_radius(const PosteriorDraws& draws, const Point& center,
                       const ModelFamily& family, double alpha);

/// L sqrt(log n)
double inflation_factor(double L, int n);

/// Throws InvalidArgument for empirical mode when a draw's k differs from k_hat.
CredibleBall build_ball(BallMode mode, const PosteriorDraws& draws, const Point& center,
                        const ModelFamily& family, double alpha, double L, int n,
                        std::optional<int> k_hat = std::nullopt);

struct CoverageCheck {
    bool covered;
    double distance;
};

/// d(theta_0, center) <= inflation * r_alpha. Throws InvalidArgument when the
/// ball was built under a different metric than the family.
CoverageCheck covers(const CredibleBall& ball, const TruthSpec& truth, const ModelFamily& family);
CoverageCheck covers(const CredibleBall& ball, const Point& truth_point, const ModelFamily& family);

/// 2 r_alpha
double diameter_proxy(const CredibleBall& ball);
/// 2 inflation r_alpha
double inflated_diameter(const CredibleBall& ball);

struct CoverageRecord {
    int replicate_id = 0;
    bool covered = false;
    double d_truth_center = 0.0;
    double r_alpha = 0.0;
    double inflation = 1.0;
    int k_hat = 0;
    double diameter = 0.0;
};

std::string coverage_csv_header();
std::string to_csv_row(const CoverageRecord& record);

}  // namespace sieve
