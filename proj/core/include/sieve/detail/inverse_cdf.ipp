#pragma once

#include <cmath>

namespace sieve {

template <class Density>
InverseCdfTable::InverseCdfTable(Density&& density, int cells) : cdf_(cells + 1, 0.0) {
    // Two-point Gauss-Legendre per cell.
    const double h = 1.0 / cells;
    const double offset = 0.5 * h / std::sqrt(3.0);
    for (int c = 0; c < cells; ++c) {
        const double mid = (c + 0.5) * h;
        const double mass = 0.5 * h * (density(mid - offset) + density(mid + offset));
        cdf_[c + 1] = cdf_[c] + mass;
    }
    finish();
}

}  // namespace sieve
