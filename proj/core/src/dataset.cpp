#include "sieve/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sieve/design.hpp"
#include "sieve/error.hpp"
#include "sieve/rng.hpp"
#include "sieve/stats.hpp"

namespace sieve {

void InverseCdfTable::finish() {
    const double total = cdf_.back();
    if (!(total > 0.0) || !std::isfinite(total))
        throw InvalidArgument("density for inverse-CDF sampling has no finite positive mass");
    for (double& c : cdf_) c /= total;
    cdf_.back() = 1.0;
}

double InverseCdfTable::operator()(double u) const {
    const int cells = static_cast<int>(cdf_.size()) - 1;
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    int c = static_cast<int>(it - cdf_.begin()) - 1;
    c = std::clamp(c, 0, cells - 1);
    const double width = cdf_[c + 1] - cdf_[c];
    const double frac = width > 0.0 ? (u - cdf_[c]) / width : 0.5;
    return std::clamp((c + frac) / cells, 0.0, 1.0);
}

namespace {

double logistic_value(double x) {
    return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace

Simulator::Simulator(const TruthSpec& truth, int n) : family_(truth.family), n_(n) {
    if (n < 0) throw InvalidArgument("simulate needs n >= 0");
    switch (family_) {
        case FamilyKind::regression:
        case FamilyKind::classification: {
            design_ = equispaced_design(n);
            signal_.resize(n);
            for (int i = 0; i < n; ++i) {
                const double f = truth.series(design_[i]);
                signal_[i] = family_ == FamilyKind::regression ? f : logistic_value(f);
            }
            break;
        }
        case FamilyKind::histogram: {
            if (histogram_truth_min(truth) <= 0.0)
                throw InvalidArgument("histogram truth density is not positive");
            inverse_cdf_ = std::make_unique<InverseCdfTable>(
                [&truth](double x) { return 1.0 + truth.series(x); });
            break;
        }
        case FamilyKind::log_linear: {
            // exp of the series; the table normalizes the mass
            inverse_cdf_ = std::make_unique<InverseCdfTable>(
                [&truth](double x) { return std::exp(truth.series(x)); });
            break;
        }
    }
}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

Dataset Simulator::draw(std::uint64_t seed) const {
    Dataset data;
    data.family = family_;
    data.seed = seed;
    Rng rng = make_rng(seed, 0x64617461ULL);
    data.y.resize(n_);
    switch (family_) {
        case FamilyKind::regression: {
            std::normal_distribution<double> noise(0.0, 1.0);
            data.x = design_;
            for (int i = 0; i < n_; ++i) data.y[i] = signal_[i] + noise(rng);
            break;
        }
        case FamilyKind::classification: {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            data.x = design_;
            for (int i = 0; i < n_; ++i) data.y[i] = unit(rng) < signal_[i] ? 1.0 : 0.0;
            break;
        }
        case FamilyKind::histogram:
        case FamilyKind::log_linear: {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            for (int i = 0; i < n_; ++i) data.y[i] = (*inverse_cdf_)(unit(rng));
            break;
        }
    }
    return data;
}

Dataset simulate(const TruthSpec& truth, int n, std::uint64_t seed) {
    return Simulator(truth, n).draw(seed);
}

std::string to_csv(const Dataset& data) {
    std::ostringstream out;
    out << "x,y\n";
    for (int i = 0; i < data.n(); ++i) {
        if (!data.x.empty()) out << format_double(data.x[i]);
        out << ',' << format_double(data.y[i]) << '\n';
    }
    return out.str();
}

Dataset dataset_from_csv(const std::string& text, FamilyKind family) {
    Dataset data;
    data.family = family;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("dataset CSV is empty");
    bool any_x = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidArgument("dataset CSV row without comma");
        const std::string xs = line.substr(0, comma);
        const std::string ys = line.substr(comma + 1);
        if (!xs.empty()) {
            data.x.push_back(std::stod(xs));
            any_x = true;
        }
        data.y.push_back(std::stod(ys));
    }
    if (any_x && data.x.size() != data.y.size())
        throw InvalidArgument("dataset CSV mixes rows with and without x");
    if (family == FamilyKind::classification)
        for (double v : data.y)
            if (v != 0.0 && v != 1.0) throw InvalidArgument("classification labels must be 0/1");
    if (family == FamilyKind::histogram || family == FamilyKind::log_linear)
        for (double v : data.y)
            if (v < 0.0 || v > 1.0) throw InvalidArgument("density observations must lie in [0,1]");
    return data;
}

}  // namespace sieve
