#include "sieve/basis.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "sieve/error.hpp"

namespace sieve {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;
}  // namespace

std::string to_string(BasisKind kind) {
    return kind == BasisKind::trigonometric ? "trigonometric" : "cosine";
}

BasisKind basis_from_string(const std::string& name) {
    if (name == "trigonometric" || name == "fourier") return BasisKind::trigonometric;
    if (name == "cosine") return BasisKind::cosine;
    throw InvalidArgument("unknown basis '" + name + "'");
}

double basis_value(BasisKind kind, int j, double x) {
    if (j < 1) throw InvalidArgument("basis index must be >= 1");
    if (kind == BasisKind::cosine) return kSqrt2 * std::cos(kPi * j * x);
    const int l = (j + 1) / 2;
    const double arg = 2.0 * kPi * l * x;
    return (j % 2 == 1) ? kSqrt2 * std::cos(arg) : kSqrt2 * std::sin(arg);
}

void basis_values(BasisKind kind, double x, std::span<double> out) {
    const int k = static_cast<int>(out.size());
    if (k == 0) return;
    const double step = (kind == BasisKind::cosine ? kPi : 2.0 * kPi) * x;
    const std::complex<double> w = std::polar(1.0, step);
    std::complex<double> z = w;
    // Re-anchor the rotation every 64 steps to keep rounding error flat.
    int harmonic = 1;
    if (kind == BasisKind::cosine) {
        for (int j = 0; j < k; ++j, ++harmonic) {
            if (harmonic % 64 == 0) z = std::polar(1.0, step * harmonic);
            out[j] = kSqrt2 * z.real();
            z *= w;
        }
        return;
    }
    for (int j = 0; j < k; j += 2, ++harmonic) {
        if (harmonic % 64 == 0) z = std::polar(1.0, step * harmonic);
        out[j] = kSqrt2 * z.real();
        if (j + 1 < k) out[j + 1] = kSqrt2 * z.imag();
        z *= w;
    }
}

double basis_integral(BasisKind kind, int j, double a, double b) {
    if (j < 1) throw InvalidArgument("basis index must be >= 1");
    if (kind == BasisKind::cosine) {
        const double f = kPi * j;
        return kSqrt2 * (std::sin(f * b) - std::sin(f * a)) / f;
    }
    const int l = (j + 1) / 2;
    const double f = 2.0 * kPi * l;
    if (j % 2 == 1) return kSqrt2 * (std::sin(f * b) - std::sin(f * a)) / f;
    return kSqrt2 * (std::cos(f * a) - std::cos(f * b)) / f;
}

double series_value(BasisKind kind, std::span<const double> coefficients, double x) {
    const int k = static_cast<int>(coefficients.size());
    if (k == 0) return 0.0;
    const double step = (kind == BasisKind::cosine ? kPi : 2.0 * kPi) * x;
    const std::complex<double> w = std::polar(1.0, step);
    std::complex<double> z = w;
    double total = 0.0;
    int harmonic = 1;
    if (kind == BasisKind::cosine) {
        for (int j = 0; j < k; ++j, ++harmonic) {
            if (harmonic % 64 == 0) z = std::polar(1.0, step * harmonic);
            total += coefficients[j] * z.real();
            z *= w;
        }
        return kSqrt2 * total;
    }
    for (int j = 0; j < k; j += 2, ++harmonic) {
        if (harmonic % 64 == 0) z = std::polar(1.0, step * harmonic);
        total += coefficients[j] * z.real();
        if (j + 1 < k) total += coefficients[j + 1] * z.imag();
        z *= w;
    }
    return kSqrt2 * total;
}

}  // namespace sieve
