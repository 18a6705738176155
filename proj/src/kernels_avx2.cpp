// AVX2 + FMA variants of the inner-loop kernels. Compiled only on x86-64
// (this translation unit gets -mavx2 -mfma); selection happens at runtime in
// kernels_dispatch.cpp, so the rest of the build stays portable.

#if defined(__x86_64__) || defined(_M_X64)

#include "sectorflow/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace sectorflow::kernels {
namespace avx2 {

namespace {

// int64 lanes in [0, 2^51) to double via the 2^52 magic-bias trick.
inline __m256d small_i64_to_pd(__m256i v) {
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    __m256d d = _mm256_castsi256_pd(_mm256_add_epi64(v, magic));
    return _mm256_sub_pd(d, _mm256_set1_pd(4503599627370496.0));
}

// log(x) for positive normal doubles. Decomposes x = 2^e * m with
// m in [sqrt(2)/2, sqrt(2)), then 2*atanh((m-1)/(m+1)) via an odd series.
inline __m256d vlog(__m256d x) {
    const __m256i mant_mask = _mm256_set1_epi64x(0x000fffffffffffffLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3ff0000000000000LL);

    __m256i bits = _mm256_castpd_si256(x);
    __m256i biased = _mm256_srli_epi64(bits, 52); // exponent field, x > 0
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

    __m256d e = _mm256_sub_pd(small_i64_to_pd(biased), _mm256_set1_pd(1023.0));

    // fold m >= sqrt(2) down one octave
    const __m256d sqrt2 = _mm256_set1_pd(1.4142135623730951);
    __m256d fold = _mm256_cmp_pd(m, sqrt2, _CMP_GE_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), fold);
    e = _mm256_add_pd(e, _mm256_and_pd(fold, _mm256_set1_pd(1.0)));

    __m256d r = _mm256_div_pd(_mm256_sub_pd(m, _mm256_set1_pd(1.0)),
                              _mm256_add_pd(m, _mm256_set1_pd(1.0)));
    __m256d r2 = _mm256_mul_pd(r, r);

    // atanh series 1 + r^2/3 + r^4/5 + ... + r^18/19, |r| <= 0.1716
    __m256d p = _mm256_set1_pd(1.0 / 19.0);
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 17.0));
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 15.0));
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 13.0));
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 11.0));
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 9.0));
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 7.0));
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 5.0));
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0 / 3.0));
    p = _mm256_fmadd_pd(p, r2, _mm256_set1_pd(1.0));

    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    __m256d t = _mm256_fmadd_pd(_mm256_add_pd(r, r), p, _mm256_mul_pd(e, ln2_lo));
    return _mm256_fmadd_pd(e, ln2_hi, t);
}

// exp(y) for |y| <= ~700 (callers clamp). Range reduction by ln2 and a
// degree-13 Taylor polynomial on |r| <= ln2/2.
inline __m256d vexp(__m256d y) {
    const __m256d inv_ln2 = _mm256_set1_pd(1.4426950408889634);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

    __m256d k = _mm256_round_pd(_mm256_mul_pd(y, inv_ln2),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(k, ln2_hi, y);
    r = _mm256_fnmadd_pd(k, ln2_lo, r);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0); // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    // scale by 2^k through the exponent field
    __m128i k32 = _mm256_cvtpd_epi32(k);
    __m256i k64 = _mm256_cvtepi32_epi64(k32);
    __m256i ebits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(ebits));
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    return std::max(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
}

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    return std::min(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
}

} // namespace

void pow_field(const double* x, double* y, double a, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d lo_lim = _mm256_set1_pd(1e-290);
    const __m256d hi_lim = _mm256_set1_pd(1e290);
    const __m256d t_lim = _mm256_set1_pd(690.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_loadu_pd(x + i);
        __m256d ok = _mm256_and_pd(_mm256_cmp_pd(xv, lo_lim, _CMP_GE_OQ),
                                   _mm256_cmp_pd(xv, hi_lim, _CMP_LE_OQ));
        __m256d t = _mm256_mul_pd(va, vlog(xv));
        __m256d t_abs = _mm256_andnot_pd(_mm256_set1_pd(-0.0), t);
        ok = _mm256_and_pd(ok, _mm256_cmp_pd(t_abs, t_lim, _CMP_LE_OQ));
        int mask = _mm256_movemask_pd(ok);
        if (mask == 0xF) {
            _mm256_storeu_pd(y + i, vexp(t));
        } else {
            // rare: subnormal/huge inputs fall back to libm lane-wise
            for (std::size_t j = 0; j < 4; ++j) y[i + j] = std::pow(x[i + j], a);
        }
    }
    for (; i < n; ++i) y[i] = std::pow(x[i], a);
}

void mul3(const double* a, const double* b, double c, double* y, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        // same rounding order as the scalar reference: (c*a)*b
        __m256d ca = _mm256_mul_pd(vc, _mm256_loadu_pd(a + i));
        _mm256_storeu_pd(y + i, _mm256_mul_pd(ca, _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) y[i] = c * a[i] * b[i];
}

double triple_sum(const double* a, const double* b, const double* c, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(c + i), acc0);
        acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(c + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(p, _mm256_loadu_pd(c + i), acc0);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i] * c[i];
    return s;
}

double sum(const double* x, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double l2_diff_sq(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double max_val(const double* x, std::size_t n) {
    std::size_t i = 0;
    double m = x[0];
    if (n >= 4) {
        __m256d vm = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) vm = _mm256_max_pd(vm, _mm256_loadu_pd(x + i));
        m = hmax(vm);
    }
    for (; i < n; ++i) m = x[i] > m ? x[i] : m;
    return m;
}

double min_val(const double* x, std::size_t n) {
    std::size_t i = 0;
    double m = x[0];
    if (n >= 4) {
        __m256d vm = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) vm = _mm256_min_pd(vm, _mm256_loadu_pd(x + i));
        m = hmin(vm);
    }
    for (; i < n; ++i) m = x[i] < m ? x[i] : m;
    return m;
}

double max_abs(const double* x, std::size_t n) {
    const __m256d sgn = _mm256_set1_pd(-0.0);
    __m256d vm = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        vm = _mm256_max_pd(vm, _mm256_andnot_pd(sgn, _mm256_loadu_pd(x + i)));
    double m = hmax(vm);
    for (; i < n; ++i) {
        double a = std::fabs(x[i]);
        m = a > m ? a : m;
    }
    return m;
}

void face_velocity(const double* pi, double* v, double inv_h, std::size_t n) {
    const __m256d vih = _mm256_set1_pd(inv_h);
    std::size_t i = 0;
    for (; i + 5 <= n; i += 4) { // reads pi[i+4], safe while i+4 <= n-1
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pi + i + 1), _mm256_loadu_pd(pi + i));
        _mm256_storeu_pd(v + i, _mm256_mul_pd(d, vih));
    }
    for (; i + 1 < n; ++i) v[i] = (pi[i + 1] - pi[i]) * inv_h;
    v[n - 1] = (pi[0] - pi[n - 1]) * inv_h;
}

std::size_t threshold_zero(double* v, double thresh, std::size_t n) {
    const __m256d sgn = _mm256_set1_pd(-0.0);
    const __m256d th = _mm256_set1_pd(thresh);
    std::size_t active = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(v + i);
        __m256d keep = _mm256_cmp_pd(_mm256_andnot_pd(sgn, x), th, _CMP_GT_OQ);
        _mm256_storeu_pd(v + i, _mm256_and_pd(x, keep));
        active += static_cast<std::size_t>(_mm_popcnt_u32(
            static_cast<unsigned>(_mm256_movemask_pd(keep))));
    }
    for (; i < n; ++i) {
        if (std::fabs(v[i]) <= thresh)
            v[i] = 0.0;
        else
            ++active;
    }
    return active;
}

void upwind_flux(const double* mu, const double* v, double* phi, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 5 <= n; i += 4) { // reads mu[i+4]
        __m256d vv = _mm256_loadu_pd(v + i);
        __m256d take_right = _mm256_cmp_pd(vv, zero, _CMP_LE_OQ);
        __m256d donor = _mm256_blendv_pd(_mm256_loadu_pd(mu + i),
                                         _mm256_loadu_pd(mu + i + 1), take_right);
        _mm256_storeu_pd(phi + i, _mm256_mul_pd(vv, donor));
    }
    for (; i < n; ++i) {
        double donor = v[i] > 0.0 ? mu[i] : mu[i + 1 == n ? 0 : i + 1];
        phi[i] = v[i] * donor;
    }
}

double flux_update(const double* mu, const double* phi, double r, double* mu_out, std::size_t n) {
    const __m256d vr = _mm256_set1_pd(r);
    __m256d vmin = _mm256_set1_pd(INFINITY);
    // cell 0 wraps to phi[n-1]
    mu_out[0] = mu[0] - r * (phi[0] - phi[n - 1]);
    double mn = mu_out[0];
    std::size_t j = 1;
    for (; j + 4 <= n; j += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(phi + j), _mm256_loadu_pd(phi + j - 1));
        // two roundings, same as the scalar reference (no fma here)
        __m256d out = _mm256_sub_pd(_mm256_loadu_pd(mu + j), _mm256_mul_pd(vr, d));
        _mm256_storeu_pd(mu_out + j, out);
        vmin = _mm256_min_pd(vmin, out);
    }
    mn = std::min(mn, hmin(vmin));
    for (; j < n; ++j) {
        double out = mu[j] - r * (phi[j] - phi[j - 1]);
        mu_out[j] = out;
        mn = out < mn ? out : mn;
    }
    return mn;
}

} // namespace avx2

bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Backend& avx2_backend() {
    static const Backend b = {
        "avx2",
        avx2::pow_field,
        avx2::mul3,
        avx2::triple_sum,
        avx2::sum,
        avx2::dot,
        avx2::l2_diff_sq,
        avx2::max_val,
        avx2::min_val,
        avx2::max_abs,
        avx2::face_velocity,
        avx2::threshold_zero,
        avx2::upwind_flux,
        avx2::flux_update,
    };
    return b;
}

} // namespace sectorflow::kernels

#endif // x86-64
