#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sectorflow/kernels.hpp"

using namespace sectorflow;

namespace {

std::vector<double> random_positive(std::size_t n, unsigned seed, double lo_exp = -3, double hi_exp = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo_exp, hi_exp);
    std::vector<double> v(n);
    for (auto& x : v) x = std::pow(10.0, u(rng));
    return v;
}

std::vector<double> random_signed(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

const std::size_t sizes[] = {1, 3, 4, 5, 8, 13, 17, 512, 513};

} // namespace

TEST_CASE("active backend resolves") {
    const auto& b = kernels::active();
    CHECK((std::string(b.name) == "scalar" || std::string(b.name) == "avx2"));
}

#if defined(__x86_64__) || defined(_M_X64)

TEST_CASE("avx2 pow_field matches std::pow") {
    if (!kernels::avx2_available()) return;
    const auto& v = kernels::avx2_backend();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(-3.0, 3.0);

    // broad range
    for (int rep = 0; rep < 20; ++rep) {
        auto x = random_positive(257, 100 + rep, -12, 12);
        double a = ua(rng);
        std::vector<double> y(x.size());
        v.pow_field(x.data(), y.data(), a, x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            double ref = std::pow(x[i], a);
            CHECK(std::fabs(y[i] - ref) <= 2e-13 * std::fabs(ref));
        }
    }
    // solver-typical range, tighter
    for (int rep = 0; rep < 20; ++rep) {
        auto x = random_positive(512, 200 + rep, -4, 4);
        double a = -1.5 + 0.15 * rep;
        std::vector<double> y(x.size());
        v.pow_field(x.data(), y.data(), a, x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            double ref = std::pow(x[i], a);
            CHECK(std::fabs(y[i] - ref) <= 1e-13 * std::fabs(ref));
        }
    }
}

TEST_CASE("avx2 kernels agree with scalar references") {
    if (!kernels::avx2_available()) return;
    const auto& s = kernels::scalar_backend();
    const auto& v = kernels::avx2_backend();

    for (std::size_t n : sizes) {
        auto a = random_positive(n, 11 * n + 1);
        auto b = random_positive(n, 11 * n + 2);
        auto c = random_signed(n, 11 * n + 3);

        CHECK(v.sum(a.data(), n) == doctest::Approx(s.sum(a.data(), n)).epsilon(1e-14));
        CHECK(v.dot(a.data(), b.data(), n) == doctest::Approx(s.dot(a.data(), b.data(), n)).epsilon(1e-14));
        CHECK(v.triple_sum(a.data(), b.data(), a.data(), n) ==
              doctest::Approx(s.triple_sum(a.data(), b.data(), a.data(), n)).epsilon(1e-14));
        CHECK(v.l2_diff_sq(a.data(), b.data(), n) ==
              doctest::Approx(s.l2_diff_sq(a.data(), b.data(), n)).epsilon(1e-14));
        CHECK(v.max_val(c.data(), n) == s.max_val(c.data(), n));
        CHECK(v.min_val(c.data(), n) == s.min_val(c.data(), n));
        CHECK(v.max_abs(c.data(), n) == s.max_abs(c.data(), n));

        std::vector<double> y1(n), y2(n);
        v.mul3(a.data(), b.data(), 1.7, y1.data(), n);
        s.mul3(a.data(), b.data(), 1.7, y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == y2[i]);

        s.face_velocity(c.data(), y1.data(), 3.0, n);
        v.face_velocity(c.data(), y2.data(), 3.0, n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == y2[i]);

        auto t1 = c, t2 = c;
        std::size_t n1 = s.threshold_zero(t1.data(), 0.5, n);
        std::size_t n2 = v.threshold_zero(t2.data(), 0.5, n);
        CHECK(n1 == n2);
        for (std::size_t i = 0; i < n; ++i) CHECK(t1[i] == t2[i]);

        std::vector<double> p1(n), p2(n);
        s.upwind_flux(a.data(), c.data(), p1.data(), n);
        v.upwind_flux(a.data(), c.data(), p2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(p1[i] == p2[i]);

        std::vector<double> m1(n), m2(n);
        double mn1 = s.flux_update(a.data(), p1.data(), 0.05, m1.data(), n);
        double mn2 = v.flux_update(a.data(), p2.data(), 0.05, m2.data(), n);
        CHECK(mn1 == mn2);
        for (std::size_t i = 0; i < n; ++i) CHECK(m1[i] == m2[i]);
    }
}

#endif

TEST_CASE("flux update telescopes: discrete mass exactly conserved") {
    const auto& k = kernels::active();
    for (std::size_t n : {8ul, 64ul, 513ul}) {
        auto mu = random_positive(n, 5 * n, -1, 1);
        auto v = random_signed(n, 5 * n + 1);
        std::vector<double> phi(n), out(n);
        k.upwind_flux(mu.data(), v.data(), phi.data(), n);
        k.flux_update(mu.data(), phi.data(), 0.01, out.data(), n);
        double before = 0, after = 0;
        for (std::size_t i = 0; i < n; ++i) {
            before += mu[i];
            after += out[i];
        }
        CHECK(std::fabs(after - before) <= 1e-13 * before);
    }
}

TEST_CASE("face velocity wraps periodically") {
    const auto& k = kernels::active();
    std::vector<double> pi = {1.0, 2.0, 4.0, 0.5};
    std::vector<double> v(4);
    k.face_velocity(pi.data(), v.data(), 2.0, 4);
    CHECK(v[0] == doctest::Approx(2.0));
    CHECK(v[1] == doctest::Approx(4.0));
    CHECK(v[2] == doctest::Approx(-7.0));
    CHECK(v[3] == doctest::Approx(1.0)); // wrap: (pi[0]-pi[3])*2
}

TEST_CASE("upwind flux picks the donor cell") {
    const auto& k = kernels::active();
    std::vector<double> mu = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> v = {0.5, -0.5, 0.0, 1.0};
    std::vector<double> phi(4);
    k.upwind_flux(mu.data(), v.data(), phi.data(), 4);
    CHECK(phi[0] == doctest::Approx(0.5 * 1.0));  // v>0: left donor
    CHECK(phi[1] == doctest::Approx(-0.5 * 3.0)); // v<0: right donor
    CHECK(phi[2] == doctest::Approx(0.0));
    CHECK(phi[3] == doctest::Approx(1.0 * 4.0)); // wrap face uses mu[3]
}
