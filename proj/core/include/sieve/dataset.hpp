#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sieve/truth.hpp"

namespace sieve {

/// Observations from one of the four models. For regression and
/// classification x holds the design points; density models leave it empty.
struct Dataset {
    FamilyKind family = FamilyKind::regression;
    std::vector<double> x;
    std::vector<double> y;
    std::uint64_t seed = 0;

    int n() const { return static_cast<int>(y.size()); }
};

/// Deterministic in (truth, n, seed).
///   regression      y_i = f_0(x_i) + z_i, z_i ~ N(0,1)
///   histogram/log   n iid draws by inverse CDF on a 4096-cell table
///   classification  y_i ~ Bernoulli(q_0(x_i))
Dataset simulate(const TruthSpec& truth, int n, std::uint64_t seed);

class InverseCdfTable;

/// Caches the truth evaluated on the design (or its inverse CDF) so that
/// repeated replicates at one sample size do not re-evaluate the series.
class Simulator {
public:
    Simulator(const TruthSpec& truth, int n);
    ~Simulator();
    Simulator(Simulator&&) noexcept;
    Simulator& operator=(Simulator&&) noexcept;

    int n() const { return n_; }
    Dataset draw(std::uint64_t seed) const;

private:
    FamilyKind family_;
    int n_;
    std::vector<double> design_;
    std::vector<double> signal_;  // f_0 or q_0 at the design
    std::unique_ptr<InverseCdfTable> inverse_cdf_;
};

std::string to_csv(const Dataset& data);
Dataset dataset_from_csv(const std::string& text, FamilyKind family);

/// Piecewise-linear inverse CDF built from a density on [0,1].
class InverseCdfTable {
public:
    template <class Density>
    InverseCdfTable(Density&& density, int cells = 4096);

    double operator()(double u) const;

private:
    void finish();
    std::vector<double> cdf_;
};

}  // namespace sieve

#include "sieve/detail/inverse_cdf.ipp"
