#include "sectorflow/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "sectorflow/errors.hpp"
#include "sectorflow/kernels.hpp"
#include "sectorflow/random_fields.hpp"

namespace sectorflow {

namespace {

double mobile_exponent(const ModelParams& p) {
    double den = 1.0 - p.eta * (p.sigma - 1.0);
    if (std::fabs(den) < 1e-14) throw config_error("steady_state: exponent denominator 1-eta(sigma-1) vanishes");
    return (p.sigma - 1.0) / den;
}

double immobile_exponent(const ModelParams& p) {
    double den = (p.beta - p.eta) * (p.sigma - 1.0) + 1.0;
    if (std::fabs(den) < 1e-14)
        throw config_error("steady_state: exponent denominator (beta-eta)(sigma-1)+1 vanishes");
    return (p.sigma - 1.0) / den;
}

} // namespace

FirmDistribution steady_state(const SectorProfiles& profiles, const ModelParams& params,
                              const CircleGrid& grid) {
    params.validate();
    profiles.validate(grid, params);
    std::vector<double> v(grid.cells);
    if (params.mobile()) {
        const double g = mobile_exponent(params);
        const std::vector<double> Atil = effective_technology(profiles, params);
        for (int j = 0; j < grid.cells; ++j) v[j] = std::pow(Atil[j], g);
    } else {
        const double g = immobile_exponent(params);
        for (int j = 0; j < grid.cells; ++j)
            v[j] = std::pow(profiles.A0[j] * std::pow(profiles.L[j], params.beta), g);
    }
    return FirmDistribution::normalized(std::move(v), grid);
}

double equilibrium_consumption(const SectorProfiles& profiles, const ModelParams& params,
                               const CircleGrid& grid) {
    params.validate();
    profiles.validate(grid, params);
    double g, I = 0.0;
    if (params.mobile()) {
        g = mobile_exponent(params);
        const std::vector<double> Atil = effective_technology(profiles, params);
        for (double a : Atil) I += std::pow(a, g);
    } else {
        g = immobile_exponent(params);
        for (int j = 0; j < grid.cells; ++j)
            I += std::pow(profiles.A0[j] * std::pow(profiles.L[j], params.beta), g);
    }
    I *= grid.h;
    return std::pow(I, 1.0 / g);
}

WelfareReport check_first_welfare(const SectorProfiles& profiles, const ModelParams& params,
                                  const CircleGrid& grid, int trials, std::uint64_t rng_seed) {
    EquilibriumModel model(profiles, params, grid);
    std::vector<double> scratch(grid.cells);

    WelfareReport rep;
    rep.trials = trials;
    rep.equilibrium_maximizes = params.eta > params.beta - 1.0;

    FirmDistribution eq = steady_state(profiles, params, grid);
    rep.x_eq = model.x_of_z(model.z_of(eq.mu.data(), scratch.data()));

    for (int t = 0; t < trials; ++t) {
        FirmDistribution mu = random_fourier_density(grid, rng_seed + static_cast<std::uint64_t>(t));
        double x = model.x_of_z(model.z_of(mu.mu.data(), scratch.data()));
        double gap = rep.equilibrium_maximizes ? x - rep.x_eq : rep.x_eq - x;
        rep.max_violation = std::max(rep.max_violation, gap);
        if (gap > 1e-12 * std::max(1.0, rep.x_eq)) ++rep.violations;
    }
    return rep;
}

double efficiency_loss(const SectorProfiles& profiles, const ModelParams& params,
                       const CircleGrid& grid) {
    ModelParams mob = params;
    mob.variant = params.eta == 0.0 ? Variant::MobileBaseline : Variant::MobileExternalities;
    mob.c0 = 0.0;
    ModelParams imm = params;
    imm.variant = Variant::ImmobileLabour;
    imm.c0 = 0.0;
    mob.validate();
    imm.validate();
    profiles.validate(grid, imm);

    const double gA = mobile_exponent(params);
    const double gB = immobile_exponent(params);
    double IA = 0.0, IB = 0.0;
    for (int j = 0; j < grid.cells; ++j) {
        IA += std::pow(profiles.A0[j], gA);
        IB += std::pow(profiles.A0[j] * std::pow(profiles.L[j], params.beta), gB);
    }
    IA *= grid.h;
    IB *= grid.h;
    return std::pow(IA, 1.0 / gA) - std::pow(IB, 1.0 / gB);
}

std::vector<double> optimal_labor_allocation(const SectorProfiles& profiles,
                                             const ModelParams& params, const CircleGrid& grid) {
    const double gA = mobile_exponent(params);
    std::vector<double> L(grid.cells);
    double I = 0.0;
    for (int j = 0; j < grid.cells; ++j) {
        L[j] = std::pow(profiles.A0[j], gA);
        I += L[j];
    }
    I *= grid.h;
    for (double& v : L) v /= I;
    return L;
}

ConvergenceFit fit_convergence_rate(const Trajectory& traj) {
    if (traj.l2_to_eq.empty())
        throw config_error("fit_convergence_rate: trajectory recorded no reference distances");

    std::vector<double> t, ld;
    for (std::size_t i = 0; i < traj.l2_to_eq.size(); ++i) {
        if (traj.l2_to_eq[i] > 1e-12) {
            t.push_back(traj.times[i]);
            ld.push_back(std::log(traj.l2_to_eq[i]));
        }
    }
    if (t.size() < 10) throw degenerate_fit_error("fit_convergence_rate: fewer than 10 usable points");

    double lmin = *std::min_element(ld.begin(), ld.end());
    double lmax = *std::max_element(ld.begin(), ld.end());
    double range = lmax - lmin;
    if (range < 1e-6) throw degenerate_fit_error("fit_convergence_rate: distance series is flat");

    const double lo = lmin + 0.2 * range;
    const double hi = lmax - 0.2 * range;
    double st = 0, sl = 0, stt = 0, stl = 0, sll = 0;
    int m = 0;
    double t_lo = 0, t_hi = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (ld[i] < lo || ld[i] > hi) continue;
        if (m == 0) t_lo = t[i];
        t_hi = t[i];
        ++m;
        st += t[i];
        sl += ld[i];
        stt += t[i] * t[i];
        stl += t[i] * ld[i];
        sll += ld[i] * ld[i];
    }
    if (m < 10) throw degenerate_fit_error("fit_convergence_rate: fewer than 10 points in the fit window");

    double det = m * stt - st * st;
    if (std::fabs(det) < 1e-300) throw degenerate_fit_error("fit_convergence_rate: degenerate time axis");
    double slope = (m * stl - st * sl) / det;
    double intercept = (sl - slope * st) / m;
    if (!(slope < 0.0)) throw degenerate_fit_error("fit_convergence_rate: no decay (slope >= 0)");

    double tss = sll - sl * sl / m;
    double rss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (ld[i] < lo || ld[i] > hi) continue;
        double r = ld[i] - (intercept + slope * t[i]);
        rss += r * r;
    }

    ConvergenceFit fit;
    fit.C1 = std::exp(intercept);
    fit.C2 = -slope;
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    fit.t_lo = t_lo;
    fit.t_hi = t_hi;
    fit.points = m;
    return fit;
}

FirmDistribution fixed_cost_example(double alpha, const CircleGrid& grid, const ModelParams& params) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("fixed_cost_example: alpha must lie in (0,1)");
    if (!(params.rho() < alpha))
        throw config_error("fixed_cost_example: requires rho = sigma(1-beta)+beta < alpha");
    if (std::fabs(grid.n - 1.0) > 1e-12) throw config_error("fixed_cost_example: requires n = 1");

    const double C = (1.0 - alpha) / std::pow(2.0, alpha);
    const double p = 1.0 - alpha;
    // antiderivative masses on [0,1/2] and its mirror on [1/2,1]
    auto left_mass = [&](double a, double b) { return C / p * (std::pow(b, p) - std::pow(a, p)); };
    auto right_mass = [&](double a, double b) {
        return C / p * (std::pow(1.0 - a, p) - std::pow(1.0 - b, p));
    };

    std::vector<double> mu(grid.cells);
    for (int j = 0; j < grid.cells; ++j) {
        double a = j * grid.h;
        double b = (j + 1) * grid.h;
        double mass;
        if (b <= 0.5)
            mass = left_mass(a, b);
        else if (a >= 0.5)
            mass = right_mass(a, b);
        else
            mass = left_mass(a, 0.5) + right_mass(0.5, b);
        mu[j] = mass / grid.h;
    }
    return FirmDistribution::from_density(std::move(mu), grid);
}

double fixed_cost_threshold(double alpha, const ModelParams& params) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw config_error("fixed_cost_threshold: alpha must lie in (0,1)");
    const double rho = params.rho();
    if (!(rho < alpha)) throw config_error("fixed_cost_threshold: requires rho < alpha");
    const double beta = params.beta;
    double max_slope = alpha * (1.0 - beta) * std::pow(1.0 - alpha, (rho - 2.0) / rho) /
                       (std::pow(2.0, alpha - 1.0 + alpha / rho) * (alpha * (1.0 - rho) + rho));
    return 0.5 * max_slope * max_slope;
}

bool stationarity_check(const FirmDistribution& mu, const SectorProfiles& profiles,
                        const ModelParams& params, const CircleGrid& grid) {
    mu.validate(grid);
    EquilibriumModel model(profiles, params, grid);
    const std::size_t N = static_cast<std::size_t>(grid.cells);
    std::vector<double> u(N), pi(N), v(N);
    model.core(mu.mu.data(), u.data(), pi.data());
    kernels::active().face_velocity(pi.data(), v.data(), 1.0 / grid.h, N);
    double vmax = kernels::active().max_abs(v.data(), N);
    return vmax <= std::sqrt(2.0 * params.c0) + 1e-12;
}

} // namespace sectorflow
