#pragma once

#include <span>
#include <string>

namespace sieve {

/// Orthonormal systems on [0,1] with mean-zero members (phi_0 = 1 excluded).
///   trigonometric: phi_{2l-1} = sqrt2 cos(2 pi l x), phi_{2l} = sqrt2 sin(2 pi l x)
///   cosine:        phi_j = sqrt2 cos(pi j x)
enum class BasisKind { trigonometric, cosine };

std::string to_string(BasisKind kind);
BasisKind basis_from_string(const std::string& name);

/// phi_j(x), j >= 1.
double basis_value(BasisKind kind, int j, double x);

/// Writes phi_1(x), ..., phi_k(x) into out (size k) using angle recurrences.
void basis_values(BasisKind kind, double x, std::span<double> out);

/// Integral of phi_j over [a, b].
double basis_integral(BasisKind kind, int j, double a, double b);

/// sum_j coefficients[j-1] * phi_j(x).
double series_value(BasisKind kind, std::span<const double> coefficients, double x);

}  // namespace sieve
