#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <vector>

#include "sieve/dataset.hpp"
#include "sieve/design.hpp"
#include "sieve/metrics.hpp"
#include "sieve/quadrature.hpp"
#include "sieve/truth.hpp"

namespace sieve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Log-likelihood bound to one dataset, for parameters in Theta(k), k <= k_max.
/// Smooth families also provide gradient and Hessian.
class Likelihood {
public:
    virtual ~Likelihood() = default;

    virtual int n() const = 0;
    virtual double value(const Vector& theta) const = 0;
    virtual bool smooth() const { return true; }
    /// Returns value; grad/hess (if non-null) are resized to theta.size().
    virtual double derivatives(const Vector& theta, Vector* grad, Matrix* hess) const = 0;
};

/// log-density exp(sum theta_j phi_j - c(theta)) tabulated on a quadrature rule.
class LogLinearDensity {
public:
    LogLinearDensity(QuadratureRule rule, BasisKind basis, int k_max);

    const QuadratureRule& rule() const { return rule_; }
    BasisKind basis() const { return basis_; }
    int k_max() const { return static_cast<int>(phi_.cols()); }
    /// phi_j at the quadrature nodes (nodes x k_max).
    const Matrix& basis_matrix() const { return phi_; }

    /// c(theta) = log int exp(sum theta_j phi_j), with max-subtraction.
    double log_normalizer(const Vector& theta) const;
    /// E_theta phi_j, j <= theta.size().
    Vector basis_expectation(const Vector& theta) const;
    /// c(theta), and optionally its gradient (E phi) and Hessian (Cov phi).
    double moments(const Vector& theta, Vector* mean, Matrix* cov) const;
    /// f_theta at the nodes.
    std::vector<double> density_values(const Vector& theta) const;

private:
    QuadratureRule rule_;
    BasisKind basis_;
    Matrix phi_;
};

struct FamilyOptions {
    int n = 0;                 // design size (regression/classification)
    int k_max = 32;            // largest model dimension handled
    BasisKind basis = BasisKind::trigonometric;
    QuadratureRule quadrature = QuadratureRule::standard();
};

/// One observation model: likelihood, semi-metric, projection and embedding.
class ModelFamily {
public:
    virtual ~ModelFamily() = default;

    virtual FamilyKind kind() const = 0;
    int k_max() const { return k_max_; }
    BasisKind basis() const { return basis_; }
    const SemiMetric& metric() const { return metric_; }

    /// Throws InvalidArgument if theta is not in Theta(k) (histogram: simplex).
    virtual void validate(const Vector& theta) const;

    virtual std::unique_ptr<Likelihood> bind(const Dataset& data) const = 0;
    /// Exact log p_theta^(n)(data) evaluated directly from the observations.
    virtual double log_likelihood(const Vector& theta, const Dataset& data) const = 0;

    /// theta^o_[k]: the projection of the truth on Theta(k).
    virtual Vector project(const TruthSpec& truth, int k) const = 0;
    /// d^2(theta_0, project(truth, k)).
    virtual double bias_at(const TruthSpec& truth, int k) const;
    /// b(1), ..., b(k_max); families override this to reuse truth evaluations.
    virtual std::vector<double> bias_profile(const TruthSpec& truth, int k_max) const;

    virtual Point embed(const Vector& theta) const = 0;
    virtual Point embed_truth(const TruthSpec& truth) const = 0;

    /// Mean of embeddings, used as the credible-ball center.
    virtual Point average(const std::vector<Point>& points) const;

protected:
    ModelFamily(int k_max, BasisKind basis, SemiMetric metric)
        : k_max_(k_max), basis_(basis), metric_(std::move(metric)) {}

    void check_dim(const Vector& theta) const;

    int k_max_;
    BasisKind basis_;
    SemiMetric metric_;
};

class RegressionLikelihood final : public Likelihood {
public:
    RegressionLikelihood(const DesignGrid& design, std::span<const double> y);

    int n() const override { return n_; }
    double value(const Vector& theta) const override;
    double derivatives(const Vector& theta, Vector* grad, Matrix* hess) const override;

    /// Phi^T Phi (not normalized), Phi^T y and y^T y over the full k_max span.
    const Matrix& cross() const { return cross_; }
    const Vector& projected_y() const { return phi_y_; }
    double y_squared() const { return y_sq_; }

private:
    int n_;
    Matrix cross_;
    Vector phi_y_;
    double y_sq_;
};

class HistogramLikelihood final : public Likelihood {
public:
    explicit HistogramLikelihood(std::span<const double> observations);

    int n() const override { return static_cast<int>(sorted_.size()); }
    bool smooth() const override { return false; }
    /// sum_j n_j log(k theta_j); -inf when some theta_j = 0 has n_j > 0.
    double value(const Vector& theta) const override;
    double derivatives(const Vector& theta, Vector* grad, Matrix* hess) const override;

    std::vector<int> counts(int k) const;

private:
    std::vector<double> sorted_;
};

class LogLinearLikelihood final : public Likelihood {
public:
    LogLinearLikelihood(const LogLinearDensity& density, std::span<const double> observations);

    int n() const override { return n_; }
    double value(const Vector& theta) const override;
    double derivatives(const Vector& theta, Vector* grad, Matrix* hess) const override;

    /// sum_i phi_j(Y_i), j <= k_max.
    const Vector& statistics() const { return stats_; }

private:
    const LogLinearDensity* density_;
    int n_;
    Vector stats_;
};

class ClassificationLikelihood final : public Likelihood {
public:
    ClassificationLikelihood(const DesignGrid& design, std::span<const double> y);

    int n() const override { return static_cast<int>(y_.size()); }
    double value(const Vector& theta) const override;
    double derivatives(const Vector& theta, Vector* grad, Matrix* hess) const override;

private:
    const DesignGrid* design_;
    Vector y_;
};

class RegressionFamily final : public ModelFamily {
public:
    RegressionFamily(int n, int k_max, BasisKind basis);

    FamilyKind kind() const override { return FamilyKind::regression; }
    const DesignGrid& design() const { return design_; }

    std::unique_ptr<Likelihood> bind(const Dataset& data) const override;
    double log_likelihood(const Vector& theta, const Dataset& data) const override;
    Vector project(const TruthSpec& truth, int k) const override;
    Point embed(const Vector& theta) const override;
    Point embed_truth(const TruthSpec& truth) const override;

    std::vector<double> bias_profile(const TruthSpec& truth, int k_max) const override;

    /// f_0 at the design points.
    std::vector<double> truth_values(const TruthSpec& truth) const;

private:
    DesignGrid design_;
};

class HistogramFamily final : public ModelFamily {
public:
    /// Embeds on a rule aligned with every breakpoint j/k, k <= k_max.
    explicit HistogramFamily(int k_max);

    FamilyKind kind() const override { return FamilyKind::histogram; }

    void validate(const Vector& theta) const override;
    std::unique_ptr<Likelihood> bind(const Dataset& data) const override;
    double log_likelihood(const Vector& theta, const Dataset& data) const override;
    /// Cell probabilities of p_0 (exact integration of the truth series).
    Vector project(const TruthSpec& truth, int k) const override;
    /// Hellinger bias on a rule aligned with the k cells (any k).
    double bias_at(const TruthSpec& truth, int k) const override;
    Point embed(const Vector& theta) const override;
    Point embed_truth(const TruthSpec& truth) const override;
};

class LogLinearFamily final : public ModelFamily {
public:
    LogLinearFamily(int k_max, BasisKind basis, QuadratureRule rule);

    FamilyKind kind() const override { return FamilyKind::log_linear; }
    const LogLinearDensity& density() const { return density_; }

    std::unique_ptr<Likelihood> bind(const Dataset& data) const override;
    double log_likelihood(const Vector& theta, const Dataset& data) const override;
    /// KL projection: solves E_{f_0} phi_j = E_{f_theta} phi_j, j <= k.
    Vector project(const TruthSpec& truth, int k) const override;
    Point embed(const Vector& theta) const override;
    Point embed_truth(const TruthSpec& truth) const override;

    std::vector<double> bias_profile(const TruthSpec& truth, int k_max) const override;

    /// E_{f_0} phi_j, j <= k_max, by quadrature.
    Vector truth_moments(const TruthSpec& truth) const;

private:
    Vector project_moments(const Vector& moments, int k, const Vector* start) const;

    LogLinearDensity density_;
};

class ClassificationFamily final : public ModelFamily {
public:
    ClassificationFamily(int n, int k_max, BasisKind basis);

    FamilyKind kind() const override { return FamilyKind::classification; }
    const DesignGrid& design() const { return design_; }

    std::unique_ptr<Likelihood> bind(const Dataset& data) const override;
    double log_likelihood(const Vector& theta, const Dataset& data) const override;
    /// Solves sum_i (q_0(x_i) - q_theta(x_i)) phi_j(x_i) = 0, j <= k.
    Vector project(const TruthSpec& truth, int k) const override;
    Point embed(const Vector& theta) const override;
    Point embed_truth(const TruthSpec& truth) const override;
    std::vector<double> bias_profile(const TruthSpec& truth, int k_max) const override;

private:
    Vector project_probabilities(const std::vector<double>& q0, int k, const Vector* start) const;

    DesignGrid design_;
};

std::unique_ptr<ModelFamily> make_family(FamilyKind kind, const FamilyOptions& options);

double logistic(double x);

/// Bin counts of data in k regular cells.
std::vector<int> histogram_counts(std::span<const double> observations, int k);

}  // namespace sieve
