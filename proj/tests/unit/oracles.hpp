#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

// Reference computations kept deliberately naive: they share no code with
// the library.
namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals = 20000) {
    if (intervals % 2) ++intervals;
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double phi_trig(int j, double x) {
    const int l = (j + 1) / 2;
    return j % 2 ? std::sqrt(2.0) * std::cos(2 * std::numbers::pi * l * x)
                 : std::sqrt(2.0) * std::sin(2 * std::numbers::pi * l * x);
}

inline double phi_cos(int j, double x) { return std::sqrt(2.0) * std::cos(std::numbers::pi * j * x); }

inline double bisect(const std::function<double(double)>& f, double lo, double hi, int iters = 200) {
    double flo = f(lo);
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline double normal_pdf(double x, double mu, double s) {
    const double z = (x - mu) / s;
    return std::exp(-0.5 * z * z) / (s * std::sqrt(2 * std::numbers::pi));
}

}  // namespace oracle
