#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sectorflow/economy.hpp"
#include "sectorflow/equilibrium.hpp"
#include "sectorflow/random_fields.hpp"

using namespace sectorflow;

namespace {

ModelParams mobile_baseline(double beta = 0.86, double sigma = 1.3144, double n = 1.0) {
    ModelParams p;
    p.variant = Variant::MobileBaseline;
    p.beta = beta;
    p.sigma = sigma;
    p.eta = 0.0;
    p.n = n;
    return p;
}

ModelParams immobile_baseline(double n = 1.0) {
    ModelParams p;
    p.variant = Variant::ImmobileLabour;
    p.beta = 0.86;
    p.sigma = 1.3144;
    p.eta = 0.0222;
    p.n = n;
    return p;
}

SectorProfiles unit_profiles(const CircleGrid& grid) {
    SectorProfiles pr;
    pr.A0.assign(grid.cells, 1.0);
    return pr;
}

// Baseline labour endowment L(i) = [sin(2 pi (i-1/4)) + 3]/2, unit-normalized.
SectorProfiles baseline_immobile_profiles(const CircleGrid& grid) {
    SectorProfiles pr;
    pr.A0.assign(grid.cells, 1.0);
    pr.L.resize(grid.cells);
    for (int j = 0; j < grid.cells; ++j) pr.L[j] = oracles::baseline_L_raw(grid.center(j));
    pr.L = normalize_mass(std::move(pr.L), grid, 1.0);
    return pr;
}

FirmDistribution inv_labor_density(const SectorProfiles& pr, const CircleGrid& grid) {
    std::vector<double> v(grid.cells);
    for (int j = 0; j < grid.cells; ++j) v[j] = 1.0 / pr.L[j];
    return FirmDistribution::normalized(std::move(v), grid);
}

} // namespace

// ---------------------------------------------------------------------------
// sector_integral
// ---------------------------------------------------------------------------

TEST_CASE("sector_integral: constants and linearity") {
    CircleGrid g(64, 1.0);
    std::vector<double> ones(64, 1.0);
    CHECK(sector_integral(ones, g) == doctest::Approx(1.0).epsilon(1e-15));

    CircleGrid g2(48, 3.5);
    std::vector<double> c(48, 2.25);
    CHECK(sector_integral(c, g2) == doctest::Approx(2.25 * 3.5).epsilon(1e-15));
}

TEST_CASE("sector_integral: full sine period integrates to zero") {
    CircleGrid g(512, 1.0);
    std::vector<double> f(512);
    for (int j = 0; j < 512; ++j) f[j] = std::sin(2.0 * M_PI * g.center(j));
    CHECK(std::fabs(sector_integral(f, g)) <= 1e-12);
}

TEST_CASE("sector_integral: non-finite input rejected") {
    CircleGrid g(8, 1.0);
    std::vector<double> f(8, 1.0);
    f[3] = std::nan("");
    CHECK_THROWS_AS(sector_integral(f, g), numeric_error);
}

// ---------------------------------------------------------------------------
// effective_technology
// ---------------------------------------------------------------------------

TEST_CASE("effective_technology: unit taste weights change nothing") {
    CircleGrid g(32, 1.0);
    ModelParams p = mobile_baseline(0.5, 2.0);
    p.variant = Variant::NonSymmetricPreferences;
    SectorProfiles pr = unit_profiles(g);
    for (int j = 0; j < g.cells; ++j) pr.A0[j] = 1.0 + 0.3 * std::cos(2 * M_PI * g.center(j));
    pr.gamma.assign(g.cells, 1.0);
    auto a = effective_technology(pr, p);
    for (int j = 0; j < g.cells; ++j) CHECK(a[j] == doctest::Approx(pr.A0[j]).epsilon(1e-15));
}

TEST_CASE("effective_technology: sigma=2 squares the taste weights") {
    CircleGrid g(128, 1.0);
    ModelParams p = mobile_baseline(0.5, 2.0);
    p.variant = Variant::NonSymmetricPreferences;
    SectorProfiles pr = unit_profiles(g);
    pr.gamma.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) pr.gamma[j] = 1.0 + 0.1 * std::sin(2 * M_PI * g.center(j));
    auto a = effective_technology(pr, p);
    for (int j = 0; j < g.cells; ++j)
        CHECK(a[j] == doctest::Approx(pr.gamma[j] * pr.gamma[j]).epsilon(1e-14));
}

TEST_CASE("effective_technology: missing gamma is a configuration error") {
    CircleGrid g(16, 1.0);
    ModelParams p = mobile_baseline(0.5, 2.0);
    p.variant = Variant::NonSymmetricPreferences;
    SectorProfiles pr = unit_profiles(g);
    CHECK_THROWS_AS(effective_technology(pr, p), config_error);
}

// ---------------------------------------------------------------------------
// z_integral
// ---------------------------------------------------------------------------

TEST_CASE("z_integral: unit integrand") {
    CircleGrid g(64, 1.0);
    CHECK(z_integral(FirmDistribution::uniform(g), unit_profiles(g), mobile_baseline(), g) ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("z_integral: step technology closed form (1 + 2^{2/3})/2") {
    CircleGrid g(512, 1.0);
    ModelParams p = mobile_baseline(0.5, 2.0); // rho = 1.5, (sigma-1)/rho = 2/3
    SectorProfiles pr = unit_profiles(g);
    for (int j = 0; j < g.cells; ++j) pr.A0[j] = g.center(j) < 0.5 ? 1.0 : 2.0;

    double z = z_integral(FirmDistribution::uniform(g), pr, p, g);
    double oracle = oracles::mobile_z([&](double x) { return x < 0.5 ? 1.0 : 2.0; },
                                      [](double) { return 1.0; }, 0.5, 2.0, 0.0, 1.0);
    CHECK(z == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(z == doctest::Approx((1.0 + std::pow(2.0, 2.0 / 3.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("z_integral: baseline immobile scenario vs high-resolution quadrature") {
    CircleGrid g(512, 1.0);
    ModelParams p = immobile_baseline();
    SectorProfiles pr = baseline_immobile_profiles(g);
    FirmDistribution mu0 = inv_labor_density(pr, g);

    double inv_norm = oracles::quadrature([](double x) { return 1.0 / oracles::baseline_L_unit(x); }, 1.0, 8192);
    double oracle = oracles::immobile_z(
        [](double) { return 1.0; }, oracles::baseline_L_unit,
        [&](double x) { return (1.0 / oracles::baseline_L_unit(x)) / inv_norm; }, 0.86, 1.3144, 0.0222,
        1.0, 8192);
    CHECK(z_integral(mu0, pr, p, g) == doctest::Approx(oracle).epsilon(1e-10));
}

// ---------------------------------------------------------------------------
// short_run_equilibrium
// ---------------------------------------------------------------------------

TEST_CASE("symmetric economy: pi = 1-beta, w = beta, P = X = 1") {
    CircleGrid g(64, 1.0);
    ModelParams p = mobile_baseline();
    auto eq = short_run_equilibrium(FirmDistribution::uniform(g), unit_profiles(g), p, g);
    for (int j = 0; j < g.cells; ++j) {
        CHECK(eq.pi[j] == doctest::Approx(0.14).epsilon(1e-13));
        CHECK(eq.w[j] == doctest::Approx(0.86).epsilon(1e-15));
    }
    CHECK(eq.P == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(eq.X == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(eq.PiAgg == doctest::Approx(0.14).epsilon(1e-12));
}

TEST_CASE("baseline immobile at the steady state: pi identically 0.14") {
    CircleGrid g(512, 1.0);
    ModelParams p = immobile_baseline();
    SectorProfiles pr = baseline_immobile_profiles(g);
    FirmDistribution eq_mu = steady_state(pr, p, g);
    auto eq = short_run_equilibrium(eq_mu, pr, p, g);
    for (int j = 0; j < g.cells; ++j) CHECK(std::fabs(eq.pi[j] - 0.14) <= 1e-10);
}

TEST_CASE("aggregate profit = 1-beta and numeraire = 1 for random draws, all variants") {
    CircleGrid g(128, 1.0);
    SectorProfiles pr;
    pr.A0.resize(g.cells);
    pr.L.resize(g.cells);
    pr.gamma.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) {
        double x = g.center(j);
        pr.A0[j] = 1.0 + 0.4 * std::sin(2 * M_PI * x) + 0.1 * std::cos(4 * M_PI * x);
        pr.L[j] = oracles::baseline_L_raw(x);
        pr.gamma[j] = 1.0 + 0.2 * std::cos(2 * M_PI * x);
    }
    pr.L = normalize_mass(std::move(pr.L), g, 1.0);
    pr.gamma = normalize_mass(std::move(pr.gamma), g, 1.0);

    ModelParams variants[4];
    variants[0] = mobile_baseline();
    variants[1] = mobile_baseline();
    variants[1].variant = Variant::MobileExternalities;
    variants[1].eta = 0.0222;
    variants[2] = immobile_baseline();
    variants[3] = mobile_baseline(0.5, 2.0);
    variants[3].variant = Variant::NonSymmetricPreferences;

    for (const auto& p : variants) {
        for (int trial = 0; trial < 25; ++trial) {
            FirmDistribution mu = random_fourier_density(g, 1000 + trial);
            auto eq = short_run_equilibrium(mu, pr, p, g);
            CHECK(std::fabs(sector_integral(eq.Y, g) - 1.0) <= 1e-10);
            double piagg = 0.0;
            for (int j = 0; j < g.cells; ++j) piagg += eq.pi[j] * mu.mu[j];
            piagg *= g.h;
            CHECK(std::fabs(piagg - (1.0 - p.beta)) <= 1e-10);
            if (p.mobile()) {
                for (int j = 0; j < g.cells; ++j) CHECK(std::fabs(eq.Y[j] - eq.Lused[j]) <= 1e-10);
            }
        }
    }
}

TEST_CASE("per-firm quantities are consistent with the production function") {
    CircleGrid g(96, 1.0);
    SectorProfiles pr;
    pr.A0.resize(g.cells);
    pr.L.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) {
        pr.A0[j] = 1.0 + 0.3 * std::cos(2 * M_PI * g.center(j));
        pr.L[j] = oracles::baseline_L_raw(g.center(j));
    }
    pr.L = normalize_mass(std::move(pr.L), g, 1.0);
    FirmDistribution mu = random_fourier_density(g, 42);

    ModelParams mob = mobile_baseline();
    ModelParams ext = mob;
    ext.variant = Variant::MobileExternalities;
    ext.eta = 0.05;
    ModelParams imm = immobile_baseline();

    for (const auto& p : {mob, ext, imm}) {
        auto eq = short_run_equilibrium(mu, pr, p, g);
        for (int j = 0; j < g.cells; ++j) {
            double A = pr.A0[j] * std::pow(mu.mu[j], p.eta);
            double q_check = A * std::pow(eq.l[j], p.beta);
            CHECK(eq.q[j] == doctest::Approx(q_check).epsilon(1e-10));
        }
    }
}

TEST_CASE("homogeneity: scaling A0 leaves pi, Y, w unchanged and scales X") {
    CircleGrid g(64, 1.0);
    ModelParams p = mobile_baseline();
    SectorProfiles pr = unit_profiles(g);
    for (int j = 0; j < g.cells; ++j) pr.A0[j] = 1.0 + 0.5 * std::sin(2 * M_PI * g.center(j));
    FirmDistribution mu = random_fourier_density(g, 9);

    auto eq1 = short_run_equilibrium(mu, pr, p, g);
    const double k = 2.7;
    SectorProfiles pr2 = pr;
    for (auto& a : pr2.A0) a *= k;
    auto eq2 = short_run_equilibrium(mu, pr2, p, g);

    for (int j = 0; j < g.cells; ++j) {
        CHECK(std::fabs(eq1.pi[j] - eq2.pi[j]) <= 1e-10);
        CHECK(std::fabs(eq1.Y[j] - eq2.Y[j]) <= 1e-10);
        CHECK(std::fabs(eq1.w[j] - eq2.w[j]) <= 1e-12);
    }
    CHECK(eq2.X == doctest::Approx(k * eq1.X).epsilon(1e-10));
}

TEST_CASE("non-symmetric preferences reduce to the baseline with rescaled technology") {
    CircleGrid g(128, 1.0);
    ModelParams p = mobile_baseline(0.6, 1.8);
    p.variant = Variant::NonSymmetricPreferences;
    SectorProfiles pr = unit_profiles(g);
    pr.gamma.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) {
        pr.A0[j] = 1.0 + 0.25 * std::cos(2 * M_PI * g.center(j));
        pr.gamma[j] = 1.0 + 0.15 * std::sin(2 * M_PI * g.center(j));
    }
    pr.gamma = normalize_mass(std::move(pr.gamma), g, 1.0);
    FirmDistribution mu = random_fourier_density(g, 31);

    auto eq_ns = short_run_equilibrium(mu, pr, p, g);

    ModelParams pb = p;
    pb.variant = Variant::MobileBaseline;
    SectorProfiles prb = unit_profiles(g);
    prb.A0 = effective_technology(pr, p);
    auto eq_b = short_run_equilibrium(mu, prb, pb, g);

    for (int j = 0; j < g.cells; ++j) {
        CHECK(std::fabs(eq_ns.pi[j] - eq_b.pi[j]) <= 1e-12);
        CHECK(std::fabs(eq_ns.Y[j] - eq_b.Y[j]) <= 1e-12);
        CHECK(std::fabs(eq_ns.Lused[j] - eq_b.Lused[j]) <= 1e-12);
    }
    CHECK(eq_ns.P == doctest::Approx(eq_b.P).epsilon(1e-12));
    CHECK(eq_ns.X == doctest::Approx(eq_b.X).epsilon(1e-12));
}

TEST_CASE("pi is constant at the steady state for every variant") {
    CircleGrid g(256, 1.0);
    SectorProfiles pr;
    pr.A0.resize(g.cells);
    pr.L.resize(g.cells);
    pr.gamma.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) {
        double x = g.center(j);
        pr.A0[j] = 1.0 + 0.3 * std::sin(2 * M_PI * x);
        pr.L[j] = oracles::baseline_L_raw(x);
        pr.gamma[j] = 1.0 + 0.2 * std::cos(2 * M_PI * x);
    }
    pr.L = normalize_mass(std::move(pr.L), g, 1.0);
    pr.gamma = normalize_mass(std::move(pr.gamma), g, 1.0);

    ModelParams vs[4];
    vs[0] = mobile_baseline();
    vs[1] = mobile_baseline();
    vs[1].variant = Variant::MobileExternalities;
    vs[1].eta = -0.1;
    vs[2] = immobile_baseline();
    vs[3] = mobile_baseline(0.7, 1.5);
    vs[3].variant = Variant::NonSymmetricPreferences;

    for (const auto& p : vs) {
        FirmDistribution eq_mu = steady_state(pr, p, g);
        auto eq = short_run_equilibrium(eq_mu, pr, p, g);
        double target = 1.0 - p.beta;
        for (int j = 0; j < g.cells; ++j) CHECK(std::fabs(eq.pi[j] - target) <= 1e-9);
    }
}

// ---------------------------------------------------------------------------
// aggregate_consumption / functional_F
// ---------------------------------------------------------------------------

TEST_CASE("aggregate consumption is the inverse price index") {
    CircleGrid g(64, 1.0);
    auto eq = short_run_equilibrium(FirmDistribution::uniform(g), unit_profiles(g), mobile_baseline(), g);
    CHECK(eq.X == doctest::Approx(1.0 / eq.P).epsilon(1e-14));
}

TEST_CASE("functional_F: symmetric economy gives zero, eta=0 gives log X") {
    CircleGrid g(64, 1.0);
    ModelParams p = mobile_baseline();
    SectorProfiles pr = unit_profiles(g);
    CHECK(std::fabs(functional_F(FirmDistribution::uniform(g), pr, p, g)) <= 1e-13);

    for (int j = 0; j < g.cells; ++j) pr.A0[j] = 1.0 + 0.4 * std::sin(2 * M_PI * g.center(j));
    FirmDistribution mu = random_fourier_density(g, 5);
    auto eq = short_run_equilibrium(mu, pr, p, g);
    CHECK(functional_F(mu, pr, p, g) == doctest::Approx(std::log(eq.X)).epsilon(1e-12));
}

TEST_CASE("functional_F prefactor arithmetic") {
    // beta = 0.86, eta = 0.0222: F = (1-beta)/(1-beta+eta) * log X = 0.14/0.1622 * log X
    CircleGrid g(64, 1.0);
    ModelParams p = mobile_baseline();
    p.variant = Variant::MobileExternalities;
    p.eta = 0.0222;
    SectorProfiles pr = unit_profiles(g);
    for (int j = 0; j < g.cells; ++j) pr.A0[j] = 1.0 + 0.4 * std::sin(2 * M_PI * g.center(j));
    FirmDistribution mu = random_fourier_density(g, 6);
    auto eq = short_run_equilibrium(mu, pr, p, g);
    double pref = 0.14 / 0.1622;
    CHECK(functional_F(mu, pr, p, g) == doctest::Approx(pref * std::log(eq.X)).epsilon(1e-10));
    CHECK(pref == doctest::Approx(0.863132).epsilon(1e-4));
}

// ---------------------------------------------------------------------------
// validation and error paths
// ---------------------------------------------------------------------------

TEST_CASE("ill-posed parameters are rejected") {
    ModelParams p = mobile_baseline(0.5, 3.0);
    p.variant = Variant::MobileExternalities;
    p.eta = 0.6; // eta(sigma-1) = 1.2 > 1
    CHECK_THROWS_AS(p.validate(), config_error);

    ModelParams q = immobile_baseline();
    q.eta = q.beta + 1.0 / (q.sigma - 1.0) + 0.1;
    CHECK_THROWS_AS(q.validate(), config_error);

    ModelParams r = mobile_baseline();
    r.variant = Variant::MobileExternalities;
    r.beta = 0.5;
    r.sigma = 0.4;
    r.eta = -0.5; // prefactor 1 - beta + eta = 0
    CHECK_THROWS_AS(r.validate(), config_error);
}

TEST_CASE("densities violating the positivity floor are rejected") {
    CircleGrid g(8, 1.0);
    std::vector<double> v(8, 1.0);
    v[2] = 1e-15;
    CHECK_THROWS_AS(FirmDistribution::from_density(v, g), config_error);
    std::vector<double> w(8, 1.0);
    w[0] = 1.5; // mass off by 1/16
    CHECK_THROWS_AS(FirmDistribution::from_density(w, g), config_error);
}
