#pragma once

// Test-only oracles, deliberately independent of the library code paths:
// plain loops, std::pow, high-resolution midpoint quadrature.

#include <cmath>
#include <functional>
#include <vector>

namespace oracles {

// Midpoint quadrature of f over [0, n) at `cells` resolution.
inline double quadrature(const std::function<double(double)>& f, double n, int cells) {
    double h = n / cells;
    double s = 0.0;
    for (int j = 0; j < cells; ++j) s += f((j + 0.5) * h);
    return s * h;
}

// The normalizing integral of the mobile short-run equilibrium evaluated in
// the continuum: Z = int [A(x) mu(x)^{1-beta+eta}]^{(sigma-1)/rho} dx.
inline double mobile_z(const std::function<double(double)>& A, const std::function<double(double)>& mu,
                       double beta, double sigma, double eta, double n, int cells = 4096) {
    double rho = sigma * (1.0 - beta) + beta;
    return quadrature(
        [&](double x) { return std::pow(A(x) * std::pow(mu(x), 1.0 - beta + eta), (sigma - 1.0) / rho); },
        n, cells);
}

// Immobile-labour counterpart: Z = int [A0 L^beta mu^{1+eta-beta}]^{(sigma-1)/sigma}.
inline double immobile_z(const std::function<double(double)>& A0, const std::function<double(double)>& L,
                         const std::function<double(double)>& mu, double beta, double sigma, double eta,
                         double n, int cells = 4096) {
    return quadrature(
        [&](double x) {
            return std::pow(A0(x) * std::pow(L(x), beta) * std::pow(mu(x), 1.0 + eta - beta),
                            (sigma - 1.0) / sigma);
        },
        n, cells);
}

// Baseline numerical-experiment labour profile, normalized to unit mass.
inline double baseline_L_raw(double x) { return (std::sin(2.0 * M_PI * (x - 0.25)) + 3.0) / 2.0; }
inline double baseline_L_unit(double x) { return baseline_L_raw(x) / 1.5; }

} // namespace oracles
