#include "sieve/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sieve/error.hpp"
#include "sieve/optimize.hpp"

namespace sieve {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

Matrix basis_matrix_at(BasisKind basis, std::span<const double> points, int k) {
    Matrix phi(static_cast<Eigen::Index>(points.size()), k);
    std::vector<double> row(k);
    for (std::size_t i = 0; i < points.size(); ++i) {
        basis_values(basis, points[i], row);
        for (int j = 0; j < k; ++j) phi(static_cast<Eigen::Index>(i), j) = row[j];
    }
    return phi;
}

void require_size(const Dataset& data, int n, const char* what) {
    if (data.n() != n)
        throw InvalidArgument(std::string(what) + ": dataset size " + std::to_string(data.n()) +
                              " does not match the design size " + std::to_string(n));
}

}  // namespace

double logistic(double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

std::vector<int> histogram_counts(std::span<const double> observations, int k) {
    if (k < 1) throw InvalidArgument("histogram needs k >= 1");
    std::vector<int> counts(k, 0);
    for (double y : observations) {
        const int cell = std::clamp(static_cast<int>(std::floor(y * k)), 0, k - 1);
        ++counts[cell];
    }
    return counts;
}

// ---------------------------------------------------------------------------
// LogLinearDensity

LogLinearDensity::LogLinearDensity(QuadratureRule rule, BasisKind basis, int k_max)
    : rule_(std::move(rule)), basis_(basis), phi_(basis_matrix_at(basis, rule_.nodes(), k_max)) {}

double LogLinearDensity::moments(const Vector& theta, Vector* mean, Matrix* cov) const {
    const auto k = theta.size();
    if (k > phi_.cols()) throw InvalidArgument("log-linear dimension exceeds k_max");
    const auto w = rule_.weights();
    Vector s = phi_.leftCols(k) * theta;
    const double top = s.maxCoeff();
    Vector p(s.size());
    double z = 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        p[i] = w[static_cast<std::size_t>(i)] * std::exp(s[i] - top);
        z += p[i];
    }
    const double c = top + std::log(z);
    if (mean || cov) {
        p /= z;
        Vector m = phi_.leftCols(k).transpose() * p;
        if (cov) {
            *cov = phi_.leftCols(k).transpose() * p.asDiagonal() * phi_.leftCols(k);
            *cov -= m * m.transpose();
        }
        if (mean) *mean = std::move(m);
    }
    return c;
}

double LogLinearDensity::log_normalizer(const Vector& theta) const {
    return moments(theta, nullptr, nullptr);
}

Vector LogLinearDensity::basis_expectation(const Vector& theta) const {
    Vector m;
    moments(theta, &m, nullptr);
    return m;
}

std::vector<double> LogLinearDensity::density_values(const Vector& theta) const {
    const double c = log_normalizer(theta);
    Vector s = phi_.leftCols(theta.size()) * theta;
    std::vector<double> out(static_cast<std::size_t>(s.size()));
    for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = std::exp(s[i] - c);
    return out;
}

// ---------------------------------------------------------------------------
// Likelihoods

RegressionLikelihood::RegressionLikelihood(const DesignGrid& design, std::span<const double> y)
    : n_(static_cast<int>(y.size())) {
    if (n_ != design.n()) throw InvalidArgument("regression data size does not match the design");
    Eigen::Map<const Vector> yv(y.data(), n_);
    const Matrix& phi = design.basis_matrix();
    cross_ = design.gram() * static_cast<double>(n_);
    phi_y_ = phi.transpose() * yv;
    y_sq_ = yv.squaredNorm();
}

double RegressionLikelihood::value(const Vector& theta) const {
    const auto k = theta.size();
    const double rss = y_sq_ - 2.0 * theta.dot(phi_y_.head(k)) +
                       theta.dot(cross_.topLeftCorner(k, k) * theta);
    return -0.5 * n_ * kLog2Pi - 0.5 * rss;
}

double RegressionLikelihood::derivatives(const Vector& theta, Vector* grad, Matrix* hess) const {
    const auto k = theta.size();
    if (grad) *grad = phi_y_.head(k) - cross_.topLeftCorner(k, k) * theta;
    if (hess) *hess = -cross_.topLeftCorner(k, k);
    return value(theta);
}

HistogramLikelihood::HistogramLikelihood(std::span<const double> observations)
    : sorted_(observations.begin(), observations.end()) {
    std::sort(sorted_.begin(), sorted_.end());
}

std::vector<int> HistogramLikelihood::counts(int k) const { return histogram_counts(sorted_, k); }

double HistogramLikelihood::value(const Vector& theta) const {
    const int k = static_cast<int>(theta.size());
    const auto n = counts(k);
    double total = 0.0;
    for (int j = 0; j < k; ++j) {
        if (n[j] == 0) continue;
        if (theta[j] <= 0.0) return -std::numeric_limits<double>::infinity();
        total += n[j] * std::log(k * theta[j]);
    }
    return total;
}

double HistogramLikelihood::derivatives(const Vector& theta, Vector* grad, Matrix* hess) const {
    const int k = static_cast<int>(theta.size());
    const auto n = counts(k);
    if (grad) {
        grad->resize(k);
        for (int j = 0; j < k; ++j) (*grad)[j] = n[j] / theta[j];
    }
    if (hess) {
        *hess = Matrix::Zero(k, k);
        for (int j = 0; j < k; ++j) (*hess)(j, j) = -n[j] / (theta[j] * theta[j]);
    }
    return value(theta);
}

LogLinearLikelihood::LogLinearLikelihood(const LogLinearDensity& density,
                                         std::span<const double> observations)
    : density_(&density), n_(static_cast<int>(observations.size())),
      stats_(Vector::Zero(density.k_max())) {
    std::vector<double> row(density.k_max());
    for (double y : observations) {
        basis_values(density.basis(), y, row);
        for (int j = 0; j < density.k_max(); ++j) stats_[j] += row[j];
    }
}

double LogLinearLikelihood::value(const Vector& theta) const {
    if (n_ == 0) return 0.0;
    return theta.dot(stats_.head(theta.size())) - n_ * density_->log_normalizer(theta);
}

double LogLinearLikelihood::derivatives(const Vector& theta, Vector* grad, Matrix* hess) const {
    if (n_ == 0) {
        if (grad) *grad = Vector::Zero(theta.size());
        if (hess) *hess = Matrix::Zero(theta.size(), theta.size());
        return 0.0;
    }
    Vector mean;
    Matrix cov;
    const double c = density_->moments(theta, grad ? &mean : nullptr, hess ? &cov : nullptr);
    if (grad) *grad = stats_.head(theta.size()) - n_ * mean;
    if (hess) *hess = -static_cast<double>(n_) * cov;
    return theta.dot(stats_.head(theta.size())) - n_ * c;
}

ClassificationLikelihood::ClassificationLikelihood(const DesignGrid& design, std::span<const double> y)
    : design_(&design), y_(Eigen::Map<const Vector>(y.data(), static_cast<Eigen::Index>(y.size()))) {
    if (static_cast<int>(y.size()) != design.n())
        throw InvalidArgument("classification data size does not match the design");
}

double ClassificationLikelihood::value(const Vector& theta) const {
    return derivatives(theta, nullptr, nullptr);
}

double ClassificationLikelihood::derivatives(const Vector& theta, Vector* grad, Matrix* hess) const {
    const auto k = theta.size();
    const auto phi = design_->basis_matrix().leftCols(k);
    const Vector f = phi * theta;
    double total = 0.0;
    Vector resid(f.size());
    Vector curv(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        total += y_[i] * f[i] - softplus(f[i]);
        const double q = logistic(f[i]);
        resid[i] = y_[i] - q;
        curv[i] = q * (1.0 - q);
    }
    if (grad) *grad = phi.transpose() * resid;
    if (hess) *hess = -(phi.transpose() * curv.asDiagonal() * phi);
    return total;
}

// ---------------------------------------------------------------------------
// ModelFamily defaults

void ModelFamily::check_dim(const Vector& theta) const {
    if (theta.size() < 1 || theta.size() > k_max_)
        throw InvalidArgument("parameter dimension " + std::to_string(theta.size()) +
                              " outside 1.." + std::to_string(k_max_));
}

void ModelFamily::validate(const Vector& theta) const {
    check_dim(theta);
    if (!theta.allFinite()) throw InvalidArgument("parameter has non-finite entries");
}

double ModelFamily::bias_at(const TruthSpec& truth, int k) const {
    return metric_.distance_sq(embed_truth(truth), embed(project(truth, k)));
}

std::vector<double> ModelFamily::bias_profile(const TruthSpec& truth, int k_max) const {
    std::vector<double> b(k_max);
    for (int k = 1; k <= k_max; ++k) b[k - 1] = bias_at(truth, k);
    return b;
}

Point ModelFamily::average(const std::vector<Point>& points) const {
    if (points.empty()) throw InvalidArgument("cannot average an empty set of points");
    std::size_t m = 0;
    for (const auto& p : points) m = std::max(m, p.values.size());
    Point out;
    out.values.assign(m, 0.0);
    for (const auto& p : points)
        for (std::size_t i = 0; i < p.values.size(); ++i) out.values[i] += p.values[i];
    for (double& v : out.values) v /= static_cast<double>(points.size());
    return out;
}

// ---------------------------------------------------------------------------
// Regression

RegressionFamily::RegressionFamily(int n, int k_max, BasisKind basis)
    : ModelFamily(k_max, basis, SemiMetric{}), design_(n, basis, k_max) {
    metric_ = SemiMetric::empirical_l2(design_.gram());
}

std::unique_ptr<Likelihood> RegressionFamily::bind(const Dataset& data) const {
    require_size(data, design_.n(), "regression");
    return std::make_unique<RegressionLikelihood>(design_, data.y);
}

double RegressionFamily::log_likelihood(const Vector& theta, const Dataset& data) const {
    validate(theta);
    require_size(data, design_.n(), "regression");
    const Vector f = design_.basis_matrix().leftCols(theta.size()) * theta;
    double rss = 0.0;
    for (int i = 0; i < data.n(); ++i) rss += (data.y[i] - f[i]) * (data.y[i] - f[i]);
    return -0.5 * data.n() * kLog2Pi - 0.5 * rss;
}

std::vector<double> RegressionFamily::truth_values(const TruthSpec& truth) const {
    std::vector<double> f(design_.n());
    const auto pts = design_.points();
    for (int i = 0; i < design_.n(); ++i) f[i] = truth.series(pts[i]);
    return f;
}

namespace {

Vector least_squares(const DesignGrid& design, const Vector& target, int k) {
    const Matrix a = design.gram(k);
    Eigen::LDLT<Matrix> ldlt(a);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-12)
        throw SingularDesign("normal equations are singular at k = " + std::to_string(k));
    const Vector rhs = design.basis_matrix().leftCols(k).transpose() * target / design.n();
    return ldlt.solve(rhs);
}

}  // namespace

Vector RegressionFamily::project(const TruthSpec& truth, int k) const {
    if (k < 1 || k > k_max_) throw InvalidArgument("projection dimension out of range");
    const auto f0 = truth_values(truth);
    return least_squares(design_, Eigen::Map<const Vector>(f0.data(), design_.n()), k);
}

std::vector<double> RegressionFamily::bias_profile(const TruthSpec& truth, int k_max) const {
    if (k_max > k_max_) throw InvalidArgument("bias range exceeds the family's k_max");
    const auto f0v = truth_values(truth);
    const Eigen::Map<const Vector> f0(f0v.data(), design_.n());
    std::vector<double> b(k_max);
    for (int k = 1; k <= k_max; ++k) {
        const Vector theta = least_squares(design_, f0, k);
        const Vector resid = f0 - design_.basis_matrix().leftCols(k) * theta;
        b[k - 1] = resid.squaredNorm() / design_.n();
    }
    return b;
}

Point RegressionFamily::embed(const Vector& theta) const {
    check_dim(theta);
    return Point{std::vector<double>(theta.data(), theta.data() + theta.size()), 0.0};
}

Point RegressionFamily::embed_truth(const TruthSpec& truth) const {
    const auto f0v = truth_values(truth);
    const Eigen::Map<const Vector> f0(f0v.data(), design_.n());
    const Vector theta = least_squares(design_, f0, k_max_);
    const Vector resid = f0 - design_.basis_matrix() * theta;
    return Point{std::vector<double>(theta.data(), theta.data() + theta.size()),
                 resid.squaredNorm() / design_.n()};
}

// ---------------------------------------------------------------------------
// Histogram

HistogramFamily::HistogramFamily(int k_max)
    : ModelFamily(k_max, BasisKind::trigonometric,
                  SemiMetric::hellinger(QuadratureRule::histogram_aligned(k_max))) {}

void HistogramFamily::validate(const Vector& theta) const {
    check_dim(theta);
    if ((theta.array() < 0.0).any()) throw InvalidArgument("histogram weights must be non-negative");
    if (std::abs(theta.sum() - 1.0) > 1e-10) throw InvalidArgument("histogram weights must sum to 1");
}

std::unique_ptr<Likelihood> HistogramFamily::bind(const Dataset& data) const {
    return std::make_unique<HistogramLikelihood>(data.y);
}

double HistogramFamily::log_likelihood(const Vector& theta, const Dataset& data) const {
    validate(theta);
    const int k = static_cast<int>(theta.size());
    double total = 0.0;
    for (double y : data.y) {
        const int cell = std::clamp(static_cast<int>(std::floor(y * k)), 0, k - 1);
        if (theta[cell] <= 0.0) return -std::numeric_limits<double>::infinity();
        total += std::log(k * theta[cell]);
    }
    return total;
}

Vector HistogramFamily::project(const TruthSpec& truth, int k) const {
    if (k < 1) throw InvalidArgument("projection dimension out of range");
    const int support = truth.support();
    Vector theta(k);
    for (int j = 0; j < k; ++j) {
        const double a = static_cast<double>(j) / k;
        const double b = static_cast<double>(j + 1) / k;
        double mass = b - a;
        for (int m = 1; m <= support; ++m)
            mass += truth.coefficients[m - 1] * basis_integral(truth.basis, m, a, b);
        theta[j] = mass;
    }
    return theta;
}

double HistogramFamily::bias_at(const TruthSpec& truth, int k) const {
    const Vector theta = project(truth, k);
    std::vector<double> breaks;
    for (int j = 1; j < k; ++j) breaks.push_back(static_cast<double>(j) / k);
    const auto rule = QuadratureRule::from_breakpoints(std::move(breaks), 8);
    const auto nodes = rule.nodes();
    const auto w = rule.weights();
    double total = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const int cell = std::clamp(static_cast<int>(std::floor(nodes[i] * k)), 0, k - 1);
        const double d = std::sqrt(std::max(0.0, 1.0 + truth.series(nodes[i]))) - std::sqrt(k * theta[cell]);
        total += w[i] * d * d;
    }
    return total;
}

Point HistogramFamily::embed(const Vector& theta) const {
    check_dim(theta);
    const int k = static_cast<int>(theta.size());
    const auto nodes = metric_.quadrature().nodes();
    Point p;
    p.values.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const int cell = std::clamp(static_cast<int>(std::floor(nodes[i] * k)), 0, k - 1);
        p.values[i] = k * theta[cell];
    }
    return p;
}

Point HistogramFamily::embed_truth(const TruthSpec& truth) const {
    const auto nodes = metric_.quadrature().nodes();
    Point p;
    p.values.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) p.values[i] = 1.0 + truth.series(nodes[i]);
    return p;
}

// ---------------------------------------------------------------------------
// Log-linear

LogLinearFamily::LogLinearFamily(int k_max, BasisKind basis, QuadratureRule rule)
    : ModelFamily(k_max, basis, SemiMetric::hellinger(rule)), density_(rule, basis, k_max) {}

std::unique_ptr<Likelihood> LogLinearFamily::bind(const Dataset& data) const {
    return std::make_unique<LogLinearLikelihood>(density_, data.y);
}

double LogLinearFamily::log_likelihood(const Vector& theta, const Dataset& data) const {
    validate(theta);
    if (data.n() == 0) return 0.0;
    const double c = density_.log_normalizer(theta);
    double total = 0.0;
    const std::span<const double> coeffs(theta.data(), static_cast<std::size_t>(theta.size()));
    for (double y : data.y) total += series_value(basis_, coeffs, y) - c;
    return total;
}

Vector LogLinearFamily::truth_moments(const TruthSpec& truth) const {
    const auto nodes = density_.rule().nodes();
    const auto w = density_.rule().weights();
    std::vector<double> s(nodes.size());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        s[i] = truth.series(nodes[i]);
        top = std::max(top, s[i]);
    }
    Vector p(static_cast<Eigen::Index>(nodes.size()));
    for (std::size_t i = 0; i < nodes.size(); ++i) p[static_cast<Eigen::Index>(i)] = w[i] * std::exp(s[i] - top);
    p /= p.sum();
    return density_.basis_matrix().transpose() * p;
}

Vector LogLinearFamily::project_moments(const Vector& moments, int k, const Vector* start) const {
    const Vector target = moments.head(k);
    auto objective = [&](const Vector& theta, Vector* grad, Matrix* hess) {
        Vector mean;
        Matrix cov;
        const double c = density_.moments(theta, grad ? &mean : nullptr, hess ? &cov : nullptr);
        if (grad) *grad = mean - target;
        if (hess) *hess = cov;
        return c - theta.dot(target);
    };
    Vector init = Vector::Zero(k);
    if (start) init.head(std::min<Eigen::Index>(k, start->size())) = start->head(std::min<Eigen::Index>(k, start->size()));
    return minimize_newton(objective, init).x;
}

Vector LogLinearFamily::project(const TruthSpec& truth, int k) const {
    if (k < 1 || k > k_max_) throw InvalidArgument("projection dimension out of range");
    return project_moments(truth_moments(truth), k, nullptr);
}

std::vector<double> LogLinearFamily::bias_profile(const TruthSpec& truth, int k_max) const {
    if (k_max > k_max_) throw InvalidArgument("bias range exceeds the family's k_max");
    const Vector moments = truth_moments(truth);
    const Point truth_point = embed_truth(truth);
    std::vector<double> b(k_max);
    Vector previous;
    for (int k = 1; k <= k_max; ++k) {
        const Vector theta = project_moments(moments, k, k > 1 ? &previous : nullptr);
        b[k - 1] = metric_.distance_sq(truth_point, embed(theta));
        previous = theta;
    }
    return b;
}

Point LogLinearFamily::embed(const Vector& theta) const {
    check_dim(theta);
    return Point{density_.density_values(theta), 0.0};
}

Point LogLinearFamily::embed_truth(const TruthSpec& truth) const {
    const auto nodes = density_.rule().nodes();
    const auto w = density_.rule().weights();
    Point p;
    p.values.resize(nodes.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        p.values[i] = std::exp(truth.series(nodes[i]));
        mass += w[i] * p.values[i];
    }
    for (double& v : p.values) v /= mass;
    return p;
}

// ---------------------------------------------------------------------------
// Classification

ClassificationFamily::ClassificationFamily(int n, int k_max, BasisKind basis)
    : ModelFamily(k_max, basis, SemiMetric::empirical_hellinger()), design_(n, basis, k_max) {}

std::unique_ptr<Likelihood> ClassificationFamily::bind(const Dataset& data) const {
    require_size(data, design_.n(), "classification");
    return std::make_unique<ClassificationLikelihood>(design_, data.y);
}

double ClassificationFamily::log_likelihood(const Vector& theta, const Dataset& data) const {
    validate(theta);
    require_size(data, design_.n(), "classification");
    const Vector f = design_.basis_matrix().leftCols(theta.size()) * theta;
    double total = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        const double q = logistic(f[i]);
        total += data.y[i] > 0.5 ? std::log(q) : std::log1p(-q);
    }
    return total;
}

Vector ClassificationFamily::project_probabilities(const std::vector<double>& q0, int k,
                                                   const Vector* start) const {
    const auto phi = design_.basis_matrix().leftCols(k);
    const double n = design_.n();
    auto objective = [&](const Vector& theta, Vector* grad, Matrix* hess) {
        const Vector f = phi * theta;
        double total = 0.0;
        Vector resid(f.size()), curv(f.size());
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            const double q0i = q0[static_cast<std::size_t>(i)];
            total += softplus(f[i]) - q0i * f[i];
            const double q = logistic(f[i]);
            resid[i] = q - q0i;
            curv[i] = q * (1.0 - q);
        }
        if (grad) *grad = phi.transpose() * resid / n;
        if (hess) *hess = phi.transpose() * curv.asDiagonal() * phi / n;
        return total / n;
    };
    Vector init = Vector::Zero(k);
    if (start) init.head(std::min<Eigen::Index>(k, start->size())) = start->head(std::min<Eigen::Index>(k, start->size()));
    return minimize_newton(objective, init).x;
}

Vector ClassificationFamily::project(const TruthSpec& truth, int k) const {
    if (k < 1 || k > k_max_) throw InvalidArgument("projection dimension out of range");
    return project_probabilities(embed_truth(truth).values, k, nullptr);
}

std::vector<double> ClassificationFamily::bias_profile(const TruthSpec& truth, int k_max) const {
    if (k_max > k_max_) throw InvalidArgument("bias range exceeds the family's k_max");
    const Point truth_point = embed_truth(truth);
    std::vector<double> b(k_max);
    Vector previous;
    for (int k = 1; k <= k_max; ++k) {
        const Vector theta = project_probabilities(truth_point.values, k, k > 1 ? &previous : nullptr);
        b[k - 1] = metric_.distance_sq(truth_point, embed(theta));
        previous = theta;
    }
    return b;
}

Point ClassificationFamily::embed(const Vector& theta) const {
    check_dim(theta);
    const Vector f = design_.basis_matrix().leftCols(theta.size()) * theta;
    Point p;
    p.values.resize(static_cast<std::size_t>(f.size()));
    for (Eigen::Index i = 0; i < f.size(); ++i) p.values[static_cast<std::size_t>(i)] = logistic(f[i]);
    return p;
}

Point ClassificationFamily::embed_truth(const TruthSpec& truth) const {
    const auto pts = design_.points();
    Point p;
    p.values.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) p.values[i] = logistic(truth.series(pts[i]));
    return p;
}

// ---------------------------------------------------------------------------

std::unique_ptr<ModelFamily> make_family(FamilyKind kind, const FamilyOptions& options) {
    if (options.k_max < 1) throw InvalidArgument("family k_max must be >= 1");
    switch (kind) {
        case FamilyKind::regression:
            return std::make_unique<RegressionFamily>(options.n, options.k_max, options.basis);
        case FamilyKind::histogram:
            return std::make_unique<HistogramFamily>(options.k_max);
        case FamilyKind::log_linear:
            return std::make_unique<LogLinearFamily>(options.k_max, options.basis, options.quadrature);
        case FamilyKind::classification:
            return std::make_unique<ClassificationFamily>(options.n, options.k_max, options.basis);
    }
    throw InvalidArgument("unknown family");
}

}  // namespace sieve
