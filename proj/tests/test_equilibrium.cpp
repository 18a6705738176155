#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sectorflow/equilibrium.hpp"
#include "sectorflow/random_fields.hpp"
#include "sectorflow/solver.hpp"

using namespace sectorflow;

namespace {

ModelParams mobile(double beta = 0.86, double sigma = 1.3144, double eta = 0.0) {
    ModelParams p;
    p.variant = eta == 0.0 ? Variant::MobileBaseline : Variant::MobileExternalities;
    p.beta = beta;
    p.sigma = sigma;
    p.eta = eta;
    return p;
}

ModelParams immobile(double eta = 0.0222) {
    ModelParams p;
    p.variant = Variant::ImmobileLabour;
    p.beta = 0.86;
    p.sigma = 1.3144;
    p.eta = eta;
    return p;
}

SectorProfiles step_profiles(const CircleGrid& g, double lo = 1.0, double hi = 2.0) {
    SectorProfiles pr;
    pr.A0.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) pr.A0[j] = g.center(j) < 0.5 * g.n ? lo : hi;
    return pr;
}

SectorProfiles baseline_immobile_profiles(const CircleGrid& g) {
    SectorProfiles pr;
    pr.A0.assign(g.cells, 1.0);
    pr.L.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) pr.L[j] = oracles::baseline_L_raw(g.center(j));
    pr.L = normalize_mass(std::move(pr.L), g, 1.0);
    return pr;
}

} // namespace

// ---------------------------------------------------------------------------
// steady_state / equilibrium_consumption
// ---------------------------------------------------------------------------

TEST_CASE("flat technology: uniform steady state and X_eq = 1") {
    CircleGrid g(64, 1.0);
    SectorProfiles pr;
    pr.A0.assign(g.cells, 1.0);
    FirmDistribution eq = steady_state(pr, mobile(), g);
    for (double v : eq.mu) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(equilibrium_consumption(pr, mobile(), g) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("step technology, sigma = 2: masses proportional to A") {
    CircleGrid g(64, 1.0);
    ModelParams p = mobile(0.5, 2.0);
    SectorProfiles pr = step_profiles(g);
    FirmDistribution eq = steady_state(pr, p, g);
    for (int j = 0; j < g.cells; ++j) {
        double expect = g.center(j) < 0.5 ? 2.0 / 3.0 : 4.0 / 3.0;
        CHECK(eq.mu[j] == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(equilibrium_consumption(pr, p, g) == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("closed-form X_eq equals the short-run X at the steady state, all variants") {
    CircleGrid g(128, 1.0);
    SectorProfiles pr;
    pr.A0.resize(g.cells);
    pr.L.resize(g.cells);
    pr.gamma.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) {
        double x = g.center(j);
        pr.A0[j] = 1.0 + 0.35 * std::sin(2 * M_PI * x);
        pr.L[j] = oracles::baseline_L_raw(x);
        pr.gamma[j] = 1.0 + 0.2 * std::cos(2 * M_PI * x);
    }
    pr.L = normalize_mass(std::move(pr.L), g, 1.0);
    pr.gamma = normalize_mass(std::move(pr.gamma), g, 1.0);

    ModelParams vs[5];
    vs[0] = mobile();
    vs[1] = mobile(0.86, 1.3144, 0.0222);
    vs[2] = mobile(0.6, 0.5, 0.0);  // complements branch
    vs[3] = immobile();
    vs[4] = mobile(0.7, 1.5);
    vs[4].variant = Variant::NonSymmetricPreferences;

    for (const auto& p : vs) {
        FirmDistribution eq_mu = steady_state(pr, p, g);
        auto eq = short_run_equilibrium(eq_mu, pr, p, g);
        CHECK(std::fabs(equilibrium_consumption(pr, p, g) - eq.X) <= 1e-10);
    }
}

TEST_CASE("immobile X_eq agrees with high-resolution quadrature of the closed form") {
    CircleGrid g(512, 1.0);
    ModelParams p = immobile();
    SectorProfiles pr = baseline_immobile_profiles(g);
    double gB = (p.sigma - 1.0) / (1.0 + (p.beta - p.eta) * (p.sigma - 1.0));
    double I = oracles::quadrature(
        [&](double x) { return std::pow(std::pow(oracles::baseline_L_unit(x), p.beta), gB); }, 1.0, 8192);
    CHECK(equilibrium_consumption(pr, p, g) == doctest::Approx(std::pow(I, 1.0 / gB)).epsilon(1e-10));
}

TEST_CASE("steady state tracks technology: increasing in A0 iff sigma > 1") {
    CircleGrid g(64, 1.0);
    SectorProfiles pr;
    pr.A0.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) pr.A0[j] = 1.0 + 0.3 * std::sin(2 * M_PI * g.center(j));

    FirmDistribution sub = steady_state(pr, mobile(0.5, 2.0), g);
    FirmDistribution comp = steady_state(pr, mobile(0.5, 0.5), g);
    for (int j = 0; j < g.cells; ++j) {
        int k = (j + 1) % g.cells;
        double dA = pr.A0[k] - pr.A0[j];
        if (std::fabs(dA) > 1e-12) {
            CHECK((sub.mu[k] - sub.mu[j]) * dA > 0.0);
            CHECK((comp.mu[k] - comp.mu[j]) * dA < 0.0);
        }
    }
}

TEST_CASE("exponent denominator zero is a configuration error") {
    CircleGrid g(64, 1.0);
    SectorProfiles pr;
    pr.A0.assign(g.cells, 1.0);
    ModelParams p = mobile(0.5, 2.0, 0.999999999999999); // eta(sigma-1) -> 1
    CHECK_THROWS_AS(steady_state(pr, p, g), config_error);
}

// ---------------------------------------------------------------------------
// check_first_welfare
// ---------------------------------------------------------------------------

TEST_CASE("equilibrium attains maximal consumption (three parameterizations)") {
    CircleGrid g(96, 1.0);
    SectorProfiles pr = step_profiles(g);
    ModelParams cases[3] = {mobile(0.86, 2.0), mobile(0.86, 0.5), mobile(0.86, 1.3144, 0.0222)};
    for (const auto& p : cases) {
        WelfareReport rep = check_first_welfare(pr, p, g, 300, 2024);
        CHECK(rep.equilibrium_maximizes);
        CHECK(rep.violations == 0);
        CHECK(rep.max_violation <= 1e-12);
    }
}

TEST_CASE("strongly negative externalities flip the equilibrium to a minimizer") {
    CircleGrid g(96, 1.0);
    SectorProfiles pr = step_profiles(g);
    ModelParams p = mobile(0.4, 0.5, -0.7); // eta < beta - 1 = -0.6, well-posed on sigma < 1
    p.validate();
    WelfareReport rep = check_first_welfare(pr, p, g, 300, 99);
    CHECK(!rep.equilibrium_maximizes);
    CHECK(rep.violations == 0);
    CHECK(rep.max_violation <= 1e-12);
}

// ---------------------------------------------------------------------------
// efficiency_loss / optimal_labor_allocation
// ---------------------------------------------------------------------------

TEST_CASE("labour allocated as in the mobile economy removes the loss") {
    CircleGrid g(128, 1.0);
    SectorProfiles pr;
    pr.A0.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) pr.A0[j] = 1.0 + 0.4 * std::sin(2 * M_PI * g.center(j));
    ModelParams p = mobile(0.86, 1.3144, 0.0222);
    pr.L = optimal_labor_allocation(pr, p, g);
    CHECK(std::fabs(efficiency_loss(pr, p, g)) <= 1e-10);
}

TEST_CASE("optimal labour allocation for a step technology at sigma = 2") {
    CircleGrid g(64, 1.0);
    SectorProfiles pr = step_profiles(g);
    auto L = optimal_labor_allocation(pr, mobile(0.5, 2.0), g);
    for (int j = 0; j < g.cells; ++j) {
        double expect = g.center(j) < 0.5 ? 2.0 / 3.0 : 4.0 / 3.0; // gA = 1
        CHECK(L[j] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("baseline efficiency loss sits near two percent") {
    CircleGrid g(512, 1.0);
    ModelParams p = immobile();
    SectorProfiles pr = baseline_immobile_profiles(g);
    double dx = efficiency_loss(pr, p, g);
    CHECK(dx >= 0.014);
    CHECK(dx <= 0.025);
    CHECK(dx == doctest::Approx(0.0193).epsilon(0.05));
}

TEST_CASE("efficiency loss is non-negative for random labour allocations") {
    CircleGrid g(96, 1.0);
    ModelParams p = immobile();
    SectorProfiles pr;
    pr.A0.resize(g.cells);
    for (int j = 0; j < g.cells; ++j) pr.A0[j] = 1.0 + 0.3 * std::cos(2 * M_PI * g.center(j));
    for (int rep = 0; rep < 100; ++rep) {
        pr.L = random_fourier_field(g, 7000 + rep);
        pr.L = normalize_mass(std::move(pr.L), g, 1.0);
        CHECK(efficiency_loss(pr, p, g) >= -1e-12);
    }
}

// ---------------------------------------------------------------------------
// fit_convergence_rate
// ---------------------------------------------------------------------------

TEST_CASE("exact exponential data are fitted exactly") {
    Trajectory tr;
    for (int k = 0; k <= 100; ++k) {
        double t = 0.02 * k;
        tr.times.push_back(t);
        tr.l2_to_eq.push_back(3.0 * std::exp(-2.0 * t));
    }
    ConvergenceFit fit = fit_convergence_rate(tr);
    CHECK(fit.C1 == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(fit.C2 == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("flat distance series raises a degenerate-fit error") {
    Trajectory tr;
    for (int k = 0; k <= 50; ++k) {
        tr.times.push_back(0.1 * k);
        tr.l2_to_eq.push_back(0.5);
    }
    CHECK_THROWS_AS(fit_convergence_rate(tr), degenerate_fit_error);
}

TEST_CASE("too few points raise a degenerate-fit error") {
    Trajectory tr;
    for (int k = 0; k < 6; ++k) {
        tr.times.push_back(0.1 * k);
        tr.l2_to_eq.push_back(std::exp(-k * 1.0));
    }
    CHECK_THROWS_AS(fit_convergence_rate(tr), degenerate_fit_error);
}

TEST_CASE("baseline immobile run decays exponentially with a tight linear fit") {
    CircleGrid g(256, 1.0);
    ModelParams p = immobile();
    SectorProfiles pr = baseline_immobile_profiles(g);
    std::vector<double> inv(g.cells);
    for (int j = 0; j < g.cells; ++j) inv[j] = 1.0 / pr.L[j];
    FirmDistribution mu0 = FirmDistribution::normalized(std::move(inv), g);
    FirmDistribution ref = steady_state(pr, p, g);
    SolverConfig cfg;
    cfg.t_end = 2.0;
    cfg.snapshot_every = 0.02;
    Trajectory tr = simulate(mu0, pr, p, g, cfg, &ref);
    ConvergenceFit fit = fit_convergence_rate(tr);
    CHECK(fit.C2 > 0.0);
    CHECK(fit.r_squared >= 0.99);
}

// ---------------------------------------------------------------------------
// fixed-cost machinery
// ---------------------------------------------------------------------------

TEST_CASE("singular example density integrates to one and peaks at the seam") {
    CircleGrid g(512, 1.0);
    ModelParams p = mobile(0.5, 0.2); // rho = 0.6 < alpha
    FirmDistribution mu = fixed_cost_example(0.8, g, p);
    CHECK(std::fabs(mu.mass(g) - 1.0) <= 1e-12);
    // the two cells flanking i = 0 dominate the uniform level 1
    CHECK(mu.mu.front() > 1.0);
    CHECK(mu.mu.back() > 1.0);
    // alpha -> 0 approaches the uniform density
    FirmDistribution flat = fixed_cost_example(1e-9, g, p);
    for (double v : flat.mu) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("example density requires rho < alpha and n = 1") {
    CircleGrid g(64, 1.0);
    CHECK_THROWS_AS(fixed_cost_example(0.5, g, mobile(0.5, 0.2)), config_error); // rho = 0.6 > 0.5
    CircleGrid g2(64, 2.0);
    ModelParams p2 = mobile(0.5, 0.2);
    p2.n = 2.0;
    CHECK_THROWS_AS(fixed_cost_example(0.8, g2, p2), config_error);
}

TEST_CASE("threshold formula matches the steepest grid slope within two percent") {
    ModelParams p = mobile(0.5, 0.2);
    const double alpha = 0.8;
    double c0 = fixed_cost_threshold(alpha, p);
    double max_slope = std::sqrt(2.0 * c0);

    CircleGrid g(8192, 1.0);
    SectorProfiles pr;
    pr.A0.assign(g.cells, 1.0);
    FirmDistribution mu = fixed_cost_example(alpha, g, p);
    auto v = velocity_field(mu, pr, p, g);
    double grid_slope = 0.0;
    for (double x : v) grid_slope = std::max(grid_slope, std::fabs(x));
    CHECK(grid_slope == doctest::Approx(max_slope).epsilon(0.02));
    CHECK(grid_slope <= max_slope + 1e-12);
}

TEST_CASE("stationarity verdicts at, below, and far below the threshold") {
    ModelParams p = mobile(0.5, 0.2);
    const double alpha = 0.8;
    double c0 = fixed_cost_threshold(alpha, p);

    CircleGrid g(512, 1.0);
    SectorProfiles pr;
    pr.A0.assign(g.cells, 1.0);
    FirmDistribution mu = fixed_cost_example(alpha, g, p);

    ModelParams at = p;
    at.c0 = c0;
    ModelParams half = p;
    half.c0 = 0.5 * c0;
    ModelParams quarter = p;
    quarter.c0 = 0.25 * c0;
    CHECK(stationarity_check(mu, pr, at, g));
    CHECK(!stationarity_check(mu, pr, half, g));
    CHECK(!stationarity_check(mu, pr, quarter, g));

    // flat profits are stationary at any c0 >= 0
    ModelParams flat = mobile();
    FirmDistribution uni = FirmDistribution::uniform(g);
    CHECK(stationarity_check(uni, pr, flat, g));
    FirmDistribution eq = steady_state(pr, flat, g);
    CHECK(stationarity_check(eq, pr, flat, g));
}
