#include "sectorflow/kernels.hpp"

#include <cmath>

// Scalar reference kernels. These define the semantics; the vector variants
// must agree with them within floating-point tolerance.

namespace sectorflow::kernels {
namespace scalar {

void pow_field(const double* x, double* y, double a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::pow(x[i], a);
}

void mul3(const double* a, const double* b, double c, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = c * a[i] * b[i];
}

double triple_sum(const double* a, const double* b, const double* c, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * c[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double l2_diff_sq(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double max_val(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = x[i] > m ? x[i] : m;
    return m;
}

double min_val(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i) m = x[i] < m ? x[i] : m;
    return m;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::fabs(x[i]);
        m = a > m ? a : m;
    }
    return m;
}

void face_velocity(const double* pi, double* v, double inv_h, std::size_t n) {
    for (std::size_t j = 0; j + 1 < n; ++j) v[j] = (pi[j + 1] - pi[j]) * inv_h;
    v[n - 1] = (pi[0] - pi[n - 1]) * inv_h;
}

std::size_t threshold_zero(double* v, double thresh, std::size_t n) {
    std::size_t active = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (std::fabs(v[j]) <= thresh)
            v[j] = 0.0;
        else
            ++active;
    }
    return active;
}

void upwind_flux(const double* mu, const double* v, double* phi, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
        double donor = v[j] > 0.0 ? mu[j] : mu[j + 1 == n ? 0 : j + 1];
        phi[j] = v[j] * donor;
    }
}

double flux_update(const double* mu, const double* phi, double r, double* mu_out, std::size_t n) {
    double mn = INFINITY;
    double left = phi[n - 1]; // face j-1/2 of cell 0
    for (std::size_t j = 0; j < n; ++j) {
        double out = mu[j] - r * (phi[j] - left);
        mu_out[j] = out;
        mn = out < mn ? out : mn;
        left = phi[j];
    }
    return mn;
}

} // namespace scalar

const Backend& scalar_backend() {
    static const Backend b = {
        "scalar",
        scalar::pow_field,
        scalar::mul3,
        scalar::triple_sum,
        scalar::sum,
        scalar::dot,
        scalar::l2_diff_sq,
        scalar::max_val,
        scalar::min_val,
        scalar::max_abs,
        scalar::face_velocity,
        scalar::threshold_zero,
        scalar::upwind_flux,
        scalar::flux_update,
    };
    return b;
}

} // namespace sectorflow::kernels
