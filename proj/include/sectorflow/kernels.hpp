#pragma once

#include <cstddef>
#include <string>

namespace sectorflow::kernels {

// ============================================================================
// Data-parallel inner loops of the solver and equilibrium maps.
//
// Every operation exists in a scalar reference form and, on x86-64 with AVX2
// and FMA, in a vectorized form. A backend is a table of function pointers;
// the active one is chosen once at startup from the CPU (override with the
// SECTORFLOW_KERNELS environment variable or set_backend()). The vector forms
// are equivalence-tested against the scalar references.
//
// All periodic index arithmetic (the j+1 wrap at the last face) is handled
// inside the face/flux kernels, so callers pass plain contiguous arrays.
// ============================================================================

struct Backend {
    const char* name;

    // y[i] = x[i]^a for strictly positive finite x.
    void (*pow_field)(const double* x, double* y, double a, std::size_t n);

    // y[i] = c * a[i] * b[i]
    void (*mul3)(const double* a, const double* b, double c, double* y, std::size_t n);

    // sum_i a[i]*b[i]*c[i]
    double (*triple_sum)(const double* a, const double* b, const double* c, std::size_t n);

    double (*sum)(const double* x, std::size_t n);
    double (*dot)(const double* a, const double* b, std::size_t n);

    // sum_i (a[i]-b[i])^2
    double (*l2_diff_sq)(const double* a, const double* b, std::size_t n);

    double (*max_val)(const double* x, std::size_t n);
    double (*min_val)(const double* x, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);

    // v[j] = (pi[j+1] - pi[j]) * inv_h with periodic wrap at j = n-1.
    void (*face_velocity)(const double* pi, double* v, double inv_h, std::size_t n);

    // Zeroes entries with |v[j]| <= thresh; returns the number left active.
    std::size_t (*threshold_zero)(double* v, double thresh, std::size_t n);

    // Donor-cell flux: phi[j] = v[j] * (v[j] > 0 ? mu[j] : mu[j+1]), wrapped.
    void (*upwind_flux)(const double* mu, const double* v, double* phi, std::size_t n);

    // mu_out[j] = mu[j] - r*(phi[j] - phi[j-1]) with wrap; returns min(mu_out).
    double (*flux_update)(const double* mu, const double* phi, double r, double* mu_out, std::size_t n);
};

const Backend& scalar_backend();

#if defined(__x86_64__) || defined(_M_X64)
bool avx2_available();
const Backend& avx2_backend();
#endif

// Active backend (auto-detected once; honours SECTORFLOW_KERNELS=scalar|avx2|auto).
const Backend& active();

// Force a backend by name ("scalar", "avx2", "auto"). Throws config_error if
// the request cannot be satisfied on this machine.
void set_backend(const std::string& name);

} // namespace sectorflow::kernels
